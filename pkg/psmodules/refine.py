"""
refine.py – Refinement engine
=============================

An instance is an equality a·x = b·y with nonzero scalars a, b and nonzero
module elements x, y. A refinement is a table (c, d, e, z) with

    a = c·e,   b = c·d,   x = d·z,   y = e·z.

Decision rule used throughout: a refinement exists iff some common divisor
t of a and b satisfies t·x ∈ b·M, and then (t, b/t, a/t, t·x/b) is one.
If (c, d, e, z) refines the instance then c·x = c·d·z = b·z, so t = c is
found by the scan; enumerating common divisors up to units is therefore a
complete search.

Also here: cancellation of common factors with lifting, the UFD shortcut, the
brute-force table oracle, the two-stage direct-sum procedure, the weak-GCD
route, the lift across a multiplicative set of primal elements, and the
lcm extraction from a product-module instance.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from psmodules import ideals
from psmodules.arith import (
    DomainDescriptor,
    ImagQuadOrder,
    Integers,
    Localized,
    PolyOverRationals,
    SFraction,
    common_divisors,
    divisors_up_to_units,
    factor_into_atoms,
    gcd,
    is_atom,
    is_coprime,
    is_prime_element,
    mcd,
    zero_divisor_witness,
)
from psmodules.config import LOCAL_POWER_CAP, SCHEMA_VERSION
from psmodules.errors import (
    DomainMismatchError,
    InternalError,
    InvalidArgumentError,
    NotPrimalError,
    UnsupportedError,
)
from psmodules.ideals import OIdeal
from psmodules.modules import (
    AnyModule,
    FgModule,
    LocModuleView,
    LocVector,
    colon_ideal,
    free_module,
    module_from_generators,
    scalar_divisors,
)

log = logging.getLogger(__name__)

FOUND = "found"
NOT_REFINABLE = "not_refinable"
UNKNOWN = "unknown"


# ------------------------------------------------------------
# DATA TYPES
# ------------------------------------------------------------
@dataclass(frozen=True)
class Instance:
    """a·x = b·y inside ``module``; scalars live in ``domain``.

    ``domain`` is the module's base ring, or the localized ring A_S when
    ``module`` is the matching ``LocModuleView`` and scalars may have
    S-denominators.
    """

    domain: DomainDescriptor
    module: AnyModule
    a: Any
    b: Any
    x: Any
    y: Any

    def __post_init__(self):
        D, M = self.domain, self.module
        if isinstance(D, Localized):
            if not isinstance(M, LocModuleView) or M.local_domain != D:
                raise DomainMismatchError(f"scalars over {D} need the module localized at the same set")
        elif isinstance(M, LocModuleView):
            raise DomainMismatchError(f"{M} takes scalars over {M.local_domain}")
        elif D != M.domain:
            raise DomainMismatchError(f"scalars over {D}, module over {M.domain}")
        a, b = D.coerce(self.a), D.coerce(self.b)
        x, y = M.coerce(self.x), M.coerce(self.y)
        if D.is_zero(a) or D.is_zero(b):
            raise InvalidArgumentError("instance scalars must be nonzero")
        if M.is_zero(x) or M.is_zero(y):
            raise InvalidArgumentError("instance vectors must be nonzero")
        if not (M.contains(x) and M.contains(y)):
            raise InvalidArgumentError("instance vectors must lie in the module")
        if not M.equal(M.scale(a, x), M.scale(b, y)):
            raise InvalidArgumentError(
                f"a·x != b·y for a={D.format(a)}, x={M.format_vector(x)}, b={D.format(b)}, y={M.format_vector(y)}"
            )
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def replace(self, **changes) -> "Instance":
        fields = {k: getattr(self, k) for k in ("domain", "module", "a", "b", "x", "y")}
        fields.update(changes)
        return Instance(**fields)

    def to_dict(self) -> Dict[str, Any]:
        D, M = self.domain, self.module
        return {
            "domain": str(D),
            "module": str(M),
            "a": D.format(self.a),
            "b": D.format(self.b),
            "x": M.format_vector(self.x),
            "y": M.format_vector(self.y),
        }


@dataclass(frozen=True)
class Refinement:
    c: Any
    d: Any
    e: Any
    z: Any

    def to_dict(self, inst: Instance) -> Dict[str, str]:
        D, M = inst.domain, inst.module
        return {
            "c": D.format(self.c),
            "d": D.format(self.d),
            "e": D.format(self.e),
            "z": M.format_vector(self.z),
        }


@dataclass(frozen=True)
class CandidateRecord:
    candidate: Any
    passed: bool
    reason: str


@dataclass(frozen=True)
class ReductionStep:
    kind: str  # ab | ay | bx | xy
    factor: Any


@dataclass
class Certificate:
    instance: Instance
    outcome: str
    method: str = "criterion"
    refinement: Optional[Refinement] = None
    candidates: List[CandidateRecord] = field(default_factory=list)
    reductions: List[ReductionStep] = field(default_factory=list)
    bounds: Optional[str] = None

    @property
    def found(self) -> bool:
        return self.outcome == FOUND

    def to_dict(self) -> Dict[str, Any]:
        inst = self.instance
        D = inst.domain
        doc: Dict[str, Any] = {
            "schema": SCHEMA_VERSION,
            "method": self.method,
            "instance": inst.to_dict(),
            "outcome": self.outcome,
            "candidates": [
                {"element": D.format(r.candidate), "passed": r.passed, "reason": r.reason}
                for r in self.candidates
            ],
            "reductions": [{"kind": s.kind, "factor": D.format(s.factor)} for s in self.reductions],
        }
        if self.refinement is not None:
            if not verify_refinement(inst, self.refinement):
                raise InternalError(f"refinement of {inst.to_dict()} fails its four equations")
            doc["refinement"] = self.refinement.to_dict(inst)
        if self.bounds is not None:
            doc["bounds"] = self.bounds
        return doc


def verify_refinement(inst: Instance, r: Refinement) -> bool:
    """The four table equations, checked exactly."""
    D, M = inst.domain, inst.module
    try:
        z = M.coerce(r.z)
    except Exception:
        return False
    return (
        M.contains(z)
        and D.eq(inst.a, D.mul(r.c, r.e))
        and D.eq(inst.b, D.mul(r.c, r.d))
        and M.equal(inst.x, M.scale(r.d, z))
        and M.equal(inst.y, M.scale(r.e, z))
    )


def _found(inst: Instance, r: Refinement, method: str, **kwargs) -> Certificate:
    if not verify_refinement(inst, r):
        raise InternalError(f"{method} produced an invalid refinement for {inst.to_dict()}")
    log.info(f"{method}: found c={inst.domain.format(r.c)} z={inst.module.format_vector(r.z)}")
    return Certificate(inst, FOUND, method, r, **kwargs)


def _candidate_divisors(D: DomainDescriptor, a, b) -> Optional[List[Any]]:
    """Common divisors of a and b to scan, or None when no complete list exists.

    Divisor enumeration where available. In a UFD the gcd alone: if t·x ∈ b·M
    for a common divisor t, then gcd·x ∈ b·M as well.
    """
    if D.enumerable:
        return common_divisors(D, a, b)
    if D.flags.is_ufd:
        return [_ufd_gcd(D, a, b)]
    return None


def _scalar_enumeration_domain(inst: Instance) -> Optional[DomainDescriptor]:
    D = inst.domain
    return D if D.enumerable else None


# ------------------------------------------------------------
# CANCELLATION
# ------------------------------------------------------------
def _largest_nonunit(D: DomainDescriptor, items: Sequence[Any]) -> Optional[Any]:
    nonunits = [t for t in items if not D.is_unit(t)]
    return nonunits[-1] if nonunits else None


def reduce_instance(inst: Instance, cross: bool = False) -> Tuple[Instance, List[ReductionStep]]:
    """Cancel nonunit common factors; ``lift_refinement`` undoes the log.

    By default only common divisors of a and b are cancelled. With
    ``cross`` a common factor of a and y, of b and x, and a scalar dividing
    both x and y in M are cancelled too.
    """
    D = _scalar_enumeration_domain(inst)
    if D is None:
        log.debug(f"no divisor enumeration over {inst.domain}; instance left unreduced")
        return inst, []
    M = inst.module
    # in M_S every element of S divides every vector, so x,y-cancellation would not terminate
    vector_cancel = cross and not (isinstance(M, LocModuleView) and M.s_generators)
    log_steps: List[ReductionStep] = []
    current = inst
    while True:
        a, b, x, y = current.a, current.b, current.x, current.y
        t = _largest_nonunit(D, common_divisors(D, a, b))
        if t is not None:
            current = current.replace(a=D.exact_div(t, a), b=D.exact_div(t, b))
            log_steps.append(ReductionStep("ab", t))
            continue
        if cross:
            t = _largest_nonunit(D, [u for u in divisors_up_to_units(D, a) if M.divide(y, u) is not None])
            if t is not None:
                current = current.replace(a=D.exact_div(t, a), y=M.divide(y, t))
                log_steps.append(ReductionStep("ay", t))
                continue
            t = _largest_nonunit(D, [u for u in divisors_up_to_units(D, b) if M.divide(x, u) is not None])
            if t is not None:
                current = current.replace(b=D.exact_div(t, b), x=M.divide(x, t))
                log_steps.append(ReductionStep("bx", t))
                continue
        if vector_cancel:
            shared = [u for u in scalar_divisors(x, M) if M.divide(y, u) is not None]
            t = _largest_nonunit(D, shared)
            if t is not None:
                current = current.replace(x=M.divide(x, t), y=M.divide(y, t))
                log_steps.append(ReductionStep("xy", t))
                continue
        break
    if log_steps:
        log.debug(f"reduced {inst.to_dict()} to {current.to_dict()} in {len(log_steps)} steps")
    return current, log_steps


def lift_refinement(r: Refinement, steps: Sequence[ReductionStep], inst: Instance) -> Refinement:
    """Replay a reduction log backwards on a refinement of the reduced instance."""
    D, M = inst.domain, inst.module
    c, d, e, z = r.c, r.d, r.e, r.z
    for step in reversed(steps):
        t = step.factor
        if step.kind == "ab":
            c = D.mul(c, t)
        elif step.kind == "ay":
            e = D.mul(e, t)
        elif step.kind == "bx":
            d = D.mul(d, t)
        elif step.kind == "xy":
            z = M.scale(t, z)
        else:
            raise InvalidArgumentError(f"unknown reduction kind {step.kind!r}")
    lifted = Refinement(c, d, e, z)
    if not verify_refinement(inst, lifted):
        raise InternalError("lifted refinement fails the original instance")
    return lifted


# ------------------------------------------------------------
# DECISION
# ------------------------------------------------------------
def _criterion_scan(inst: Instance) -> Certificate:
    D, M = inst.domain, inst.module
    try:
        candidates = _candidate_divisors(D, inst.a, inst.b)
        bounds = f"no divisor enumeration or gcd over {D}"
    except UnsupportedError as e:
        candidates, bounds = None, str(e)
    complete = candidates is not None
    if not complete and isinstance(D, Localized):
        candidates = _local_common_divisors(D, inst.a, inst.b)
        bounds = f"{bounds}; scanned common divisors below num(a)*s^{LOCAL_POWER_CAP} only"
    if candidates is None:
        log.warning(f"criterion: {bounds}")
        return Certificate(inst, UNKNOWN, "criterion", bounds=bounds)
    records: List[CandidateRecord] = []
    for t in candidates:
        z = M.divide(M.scale(t, inst.x), inst.b)
        if z is None:
            log.debug(f"candidate {D.format(t)}: t·x not in b·M")
            records.append(CandidateRecord(t, False, "t*x not in b*M"))
            continue
        records.append(CandidateRecord(t, True, "t*x in b*M"))
        r = Refinement(t, D.exact_div(t, inst.b), D.exact_div(t, inst.a), z)
        return _found(inst, r, "criterion", candidates=records)
    if not complete:
        log.warning(f"criterion: {bounds}")
        return Certificate(inst, UNKNOWN, "criterion", candidates=records, bounds=bounds)
    log.info(f"criterion: not refinable after {len(records)} candidates")
    return Certificate(inst, NOT_REFINABLE, "criterion", candidates=records)


def find_refinement(
    inst: Instance,
    reduce: bool = False,
    cross: bool = False,
) -> Certificate:
    """Decide the instance; Unknown when no complete candidate list exists."""
    if not reduce:
        return _criterion_scan(inst)
    reduced, steps = reduce_instance(inst, cross=cross)
    cert = _criterion_scan(reduced)
    if cert.outcome == UNKNOWN:
        return Certificate(inst, UNKNOWN, "criterion", reductions=steps, bounds=cert.bounds)
    if not cert.found:
        # cancellation only transports refinements upwards; refute on the original
        direct = _criterion_scan(inst)
        direct.reductions = steps
        return direct
    lifted = lift_refinement(cert.refinement, steps, inst)
    return _found(inst, lifted, "criterion", candidates=cert.candidates, reductions=steps)


def brute_force_refinable(inst: Instance) -> Optional[Refinement]:
    """Oracle over whole tables: every d | b with c = b/d dividing a, z
    solved from y = e·z, and x = d·z checked on its own."""
    D, M = inst.domain, inst.module
    if not D.enumerable:
        raise UnsupportedError(f"table enumeration needs divisor lists over {D}")
    for d0 in divisors_up_to_units(D, inst.b):
        for u in D.units():
            d = D.mul(u, d0)
            c = D.exact_div(d, inst.b)
            e = D.exact_div(c, inst.a)
            if e is None:
                continue
            z = M.divide(inst.y, e)
            if z is not None and M.equal(M.scale(d, z), inst.x):
                return Refinement(c, d, e, z)
    return None


def oracle_certificate(inst: Instance) -> Certificate:
    r = brute_force_refinable(inst)
    if r is None:
        return Certificate(inst, NOT_REFINABLE, "oracle")
    return _found(inst, r, "oracle")


# ------------------------------------------------------------
# UFD SHORTCUT
# ------------------------------------------------------------
def _prime_factors(D: DomainDescriptor, a) -> List[Any]:
    """Prime factors of a with multiplicity (nonunits only)."""
    if isinstance(D, Integers):
        return factor_into_atoms(D, a) if not D.is_unit(a) else []
    if isinstance(D, ImagQuadOrder):
        return factor_into_atoms(D, a) if not D.is_unit(a) else []
    if isinstance(D, Localized):
        return _local_prime_factors(D, a)
    raise UnsupportedError(f"no prime factorization over {D}")


def _local_divisor_classes(L: Localized, num):
    """(saturated ideal, base element) per class of A_S-associates among the
    base divisors of num·s^k, k ≤ LOCAL_POWER_CAP; lazily, smallest k first."""
    base = L.base
    seen: List[OIdeal] = []
    for k in range(LOCAL_POWER_CAP + 1):
        for g in divisors_up_to_units(base, base.mul(num, base.power(L.s, k))):
            J = ideals.saturation(ideals.ideal_from_generators(base, [g]), L.s)
            if J in seen:
                continue
            seen.append(J)
            yield J, g


def _local_prime_factors(L: Localized, a) -> List[Any]:
    """Primes of A_S with product a up to a unit.

    A base element whose saturated ideal is prime generates a prime of A_S;
    each one is peeled off a, so the saturated norm drops every round.
    """
    current = L.coerce(a)
    primes: List[Any] = []
    while not L.is_unit(current):
        g = next(
            (g for J, g in _local_divisor_classes(L, current.num) if not J.is_unit_ideal() and ideals.is_prime_ideal(J)),
            None,
        )
        if g is None:
            raise UnsupportedError(
                f"no prime of {L} divides {L.format(current)} among divisors of its numerator times s^{LOCAL_POWER_CAP}"
            )
        p = L.coerce(g)
        primes.append(p)
        current = L.exact_div(p, current)
    return primes


def _local_common_divisors(L: Localized, a, b) -> List[Any]:
    """Common divisors of a and b in A_S found below num(a)·s^k; not exhaustive."""
    found: List[Any] = []
    for J, g in _local_divisor_classes(L, a.num):
        t = L.one if J.is_unit_ideal() else L.coerce(g)
        if L.exact_div(t, b) is not None:
            found.append(t)
    return found


def _ufd_gcd(D: DomainDescriptor, a, b):
    if isinstance(D, (Integers, PolyOverRationals)):
        return gcd(D, a, b)
    c, rest = D.one, b
    for p in _prime_factors(D, a):
        q = D.exact_div(p, rest)
        if q is not None:
            c, rest = D.mul(c, p), q
    return c


def ufd_fast_path(inst: Instance) -> Certificate:
    """Prime-by-prime allocation: c collects the primes of a that divide b.

    In a GCD domain the gcd works whenever any common divisor does, so a
    single membership test x ∈ (b/c)·M decides the instance.
    """
    D, M = inst.domain, inst.module
    if not D.flags.is_ufd:
        raise UnsupportedError(f"{D} is not a UFD")
    c = _ufd_gcd(D, inst.a, inst.b)
    d = D.exact_div(c, inst.b)
    e = D.exact_div(c, inst.a)
    if d is None or e is None:
        raise InternalError(f"gcd {D.format(c)} does not divide both scalars")
    z = M.divide(inst.x, d)
    if z is None:
        log.info(f"ufd: x not divisible by b/gcd = {D.format(d)}")
        return Certificate(inst, NOT_REFINABLE, "ufd", candidates=[CandidateRecord(c, False, "x not in (b/c)*M")])
    return _found(inst, Refinement(c, d, e, z), "ufd", candidates=[CandidateRecord(c, True, "x in (b/c)*M")])


# ------------------------------------------------------------
# WEAK GCD ROUTE & DIRECT SUMS
# ------------------------------------------------------------
def mcd_refinement(inst: Instance) -> Certificate:
    """Divide by a maximal common divisor d and try b/d | x."""
    D, M = inst.domain, inst.module
    d = mcd(D, inst.a, inst.b)
    a1, b1 = D.exact_div(d, inst.a), D.exact_div(d, inst.b)
    z = M.divide(inst.x, b1)
    if z is None:
        bounds = f"b/mcd = {D.format(b1)} does not divide x; inconclusive unless the module is PS"
        log.info(f"mcd: {bounds}")
        return Certificate(inst, UNKNOWN, "mcd", candidates=[CandidateRecord(d, False, "x not in (b/d)*M")], bounds=bounds)
    return _found(inst, Refinement(d, b1, a1, z), "mcd", candidates=[CandidateRecord(d, True, "x in (b/d)*M")])


def _split_vector(M: AnyModule, first: AnyModule, v) -> Tuple[Any, Any]:
    if isinstance(M, LocModuleView):
        v = M.coerce(v)
        k = first.rank
        return LocVector(v.nums[:k], v.exps), LocVector(v.nums[k:], v.exps)
    v = M.coerce(v)
    return v[: first.rank], v[first.rank:]


def direct_sum_refinement(inst: Instance, first: AnyModule, second: AnyModule) -> Certificate:
    """Two-stage split in first ⊕ second.

    Stage one picks c | a, b with (b/c) | x₁ in the first summand; stage two
    picks c′ | a/c, b/c with (b/(c·c′)) | x₂ in the second. Every stage-one
    candidate is tried, so a refinement of the sum is never missed.
    """
    D, M = inst.domain, inst.module
    if M.rank != first.rank + second.rank:
        raise DomainMismatchError("summand ranks do not add up to the module rank")
    stage_one = _candidate_divisors(D, inst.a, inst.b)
    if stage_one is None:
        return Certificate(inst, UNKNOWN, "direct_sum", bounds=f"no divisor enumeration or gcd over {D}")
    x1, x2 = _split_vector(M, first, inst.x)
    records: List[CandidateRecord] = []
    for c in stage_one:
        d1 = D.exact_div(c, inst.b)
        if first.divide(x1, d1) is None:
            records.append(CandidateRecord(c, False, "x1 not in (b/c)*M1"))
            continue
        a1, b1 = D.exact_div(c, inst.a), d1
        for c2 in _candidate_divisors(D, a1, b1):
            d = D.exact_div(c2, b1)
            if second.divide(x2, d) is None:
                continue
            cc = D.mul(c, c2)
            records.append(CandidateRecord(c, True, f"second stage c'={D.format(c2)}"))
            z = M.divide(inst.x, d)
            if z is None:
                raise InternalError("componentwise divisibility did not assemble in the sum")
            return _found(inst, Refinement(cc, d, D.exact_div(cc, inst.a), z), "direct_sum", candidates=records)
        records.append(CandidateRecord(c, False, "no second-stage divisor"))
    return Certificate(inst, NOT_REFINABLE, "direct_sum", candidates=records)


# ------------------------------------------------------------
# LOCALIZATION & LIFTING
# ------------------------------------------------------------
def localize_instance(inst: Instance, S: Sequence[Any]) -> Instance:
    """The same equality read in M_S over A_S."""
    if not isinstance(inst.module, FgModule):
        raise UnsupportedError("only instances in a finitely generated module can be localized")
    L = Localized(inst.domain, tuple(S))
    view = LocModuleView(inst.module, L.s_generators)
    return Instance(L, view, L.coerce(inst.a), L.coerce(inst.b), view.coerce(inst.x), view.coerce(inst.y))


def _split(
    D: DomainDescriptor,
    s,
    first_ok: Callable[[Any], bool],
    second_ok: Callable[[Any], bool],
    pair: Tuple[str, str],
) -> Tuple[Any, Any]:
    """s = s₁·s₂ with first_ok(s₁) and second_ok(s₂), by divisor enumeration."""
    if D.is_unit(s):
        return D.one, s
    for s1 in divisors_up_to_units(D, s):
        s2 = D.exact_div(s1, s)
        if first_ok(s1) and second_ok(s2):
            return s1, s2
    raise NotPrimalError(D.format(s), pair)


def _plain(D: DomainDescriptor, value):
    if isinstance(value, SFraction):
        if any(value.exps):
            raise InvalidArgumentError("a trivial localization cannot carry denominators")
        return value.num
    if isinstance(value, LocVector):
        if any(value.exps):
            raise InvalidArgumentError("a trivial localization cannot carry denominators")
        return value.nums
    return value


def nagata_lift(refined: Refinement, inst: Instance, S: Sequence[Any]) -> Refinement:
    """Turn a refinement over A_S into one over A.

    Denominators are moved out by splitting elements of S: first s, the
    denominator of b/c, against (b₁, z), then the leftover against
    (b₁/s₁, a₁); the same for t, the denominator of z. Each split is found
    by enumerating divisors and fails with ``NotPrimalError``.
    """
    D, M = inst.domain, inst.module
    if not isinstance(M, FgModule):
        raise UnsupportedError("the lift targets a finitely generated module over A")
    gens = [g for g in (D.coerce(g) for g in S) if not D.is_unit(g)]
    if not gens:
        r = Refinement(_plain(D, refined.c), _plain(D, refined.d), _plain(D, refined.e), _plain(D, refined.z))
        if not verify_refinement(inst, r):
            raise InvalidArgumentError("the given refinement does not refine the instance")
        return r
    local = localize_instance(inst, gens)
    L, view = local.domain, local.module
    c, e = L.coerce(refined.c), L.coerce(refined.e)
    if not verify_refinement(local, Refinement(c, L.coerce(refined.d), e, view.coerce(refined.z))):
        raise InvalidArgumentError("the given refinement does not refine the localized instance")

    # a = a₁·a₂ over A: split the denominators of c and e against the numerators
    sigma = D.mul(L.monomial(c.exps), L.monomial(e.exps))
    u, v = _split(
        D,
        sigma,
        lambda p: D.exact_div(p, c.num) is not None,
        lambda q: D.exact_div(q, e.num) is not None,
        (D.format(c.num), D.format(e.num)),
    )
    a1, a2 = D.exact_div(u, c.num), D.exact_div(v, e.num)

    d_local = L.exact_div(L.coerce(a1), local.b)
    z_local = None if d_local is None else view.divide(local.x, d_local)
    if z_local is None:
        raise InternalError("a₁ lost its divisibility after clearing denominators")
    b1, s = d_local.num, L.monomial(d_local.exps)
    z, t = z_local.nums, L.monomial(z_local.exps)

    # s | b₁·z in M: s = s₁·s₂ with s₁ | b₁ and s₂ | z
    s1, s2 = _split(
        D,
        s,
        lambda p: D.exact_div(p, b1) is not None,
        lambda q: M.divide(z, q) is not None,
        (D.format(b1), M.format_vector(z)),
    )
    rest = D.exact_div(s1, b1)
    # s₂ | (b₁/s₁)·a₁: s₂ = s₃·s₄ with s₃ | b₁/s₁ and s₄ | a₁
    s3, s4 = _split(
        D,
        s2,
        lambda p: D.exact_div(p, rest) is not None,
        lambda q: D.exact_div(q, a1) is not None,
        (D.format(rest), D.format(a1)),
    )
    # b = c₁·d and t·x = rest·(z/s₂) = d·(s₃·z/s₂)
    c1 = D.exact_div(s4, a1)
    d = D.exact_div(s3, rest)
    c2 = D.mul(a2, s4)
    z1 = M.scale(s3, M.divide(z, s2))

    # t | d·z′ in M: t = t₁·t₂ with t₁ | d and t₂ | z′
    t1, t2 = _split(
        D,
        t,
        lambda p: D.exact_div(p, d) is not None,
        lambda q: M.divide(z1, q) is not None,
        (D.format(d), M.format_vector(z1)),
    )
    z2 = M.divide(z1, t2)
    # t₁ | c₂·(z′/t₂) in M: t₁ = t₃·t₄ with t₃ | c₂ and t₄ | z′/t₂
    t3, t4 = _split(
        D,
        t1,
        lambda p: D.exact_div(p, c2) is not None,
        lambda q: M.divide(z2, q) is not None,
        (D.format(c2), M.format_vector(z2)),
    )
    lifted = Refinement(D.mul(c1, t3), D.exact_div(t3, d), D.exact_div(t3, c2), M.divide(z2, t4))
    if not verify_refinement(inst, lifted):
        raise InternalError("lifted refinement fails the instance over A")
    log.info(f"lift: {inst.to_dict()} refined with c={D.format(lifted.c)}")
    return lifted


# ------------------------------------------------------------
# LCM FROM A PRODUCT INSTANCE
# ------------------------------------------------------------
def lcm_via_product_refinement(a, b, multiples: Sequence[Any], domain: Optional[DomainDescriptor] = None):
    """ab/c from a refinement of a·(f/a)_f = b·(f/b)_f over the listed multiples.

    The first passing divisor c is the least t with ab/t dividing every
    listed f, so the result is the largest such common multiple: the lcm as
    soon as the lcm is listed, gcd(ab, gcd of the list) in general.
    """
    D = domain or Integers()
    if not D.flags.is_gcd:
        raise UnsupportedError(f"lcm extraction needs a GCD domain, {D} is not one")
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(a) or D.is_zero(b):
        raise InvalidArgumentError("lcm needs nonzero arguments")
    if not multiples:
        raise InvalidArgumentError("at least one common multiple is required")
    fs = [D.coerce(f) for f in multiples]
    for f in fs:
        if D.is_zero(f) or D.exact_div(a, f) is None or D.exact_div(b, f) is None:
            raise InvalidArgumentError(f"{D.format(f)} is not a nonzero common multiple")
    M = free_module(D, len(fs))
    x = tuple(D.exact_div(a, f) for f in fs)
    y = tuple(D.exact_div(b, f) for f in fs)
    cert = find_refinement(Instance(D, M, a, b, x, y))
    if not cert.found:
        raise InternalError("a product of copies of a GCD domain refused to refine")
    result = D.normalize(D.exact_div(cert.refinement.c, D.mul(a, b)))
    if D.exact_div(a, result) is None or D.exact_div(b, result) is None:
        raise InternalError(f"{D.format(result)} is not a common multiple")
    if any(D.exact_div(result, f) is None for f in fs):
        raise InternalError(f"{D.format(result)} does not divide every listed multiple")
    return result


# ------------------------------------------------------------
# NON-PS WITNESSES
# ------------------------------------------------------------
def _ideal_module(I: OIdeal) -> FgModule:
    return module_from_generators(I.domain, 1, [(g,) for g in I.basis_elements()])


def coprime_ideal_witness(I: OIdeal, height: int = 2) -> Optional[Certificate]:
    """For a proper ideal holding a coprime pair (a, b), a·b = b·a in I
    does not refine: any table would put a unit into I."""
    D = I.domain
    if I.is_zero() or I.is_unit_ideal():
        raise InvalidArgumentError("coprime witnesses live in proper nonzero ideals")
    basis = I.basis_elements()
    pool = []
    for coeffs in _coefficient_grid(len(basis), height):
        v = D.zero
        for k, g in zip(coeffs, basis):
            v = D.add(v, D.mul(D.coerce(k), g))
        if not D.is_zero(v):
            v = D.normalize(v)
            if v not in pool:
                pool.append(v)
    pool.sort(key=D.sort_key)
    M = _ideal_module(I)
    for i, a in enumerate(pool):
        for b in pool[i + 1:]:
            if is_coprime(D, a, b):
                cert = find_refinement(Instance(D, M, a, b, (b,), (a,)))
                if cert.found:
                    raise InternalError(f"coprime pair refined inside the proper ideal {I}")
                return cert
    return None


def _coefficient_grid(n: int, height: int):
    if n == 0:
        yield ()
        return
    for head in range(-height, height + 1):
        for tail in _coefficient_grid(n - 1, height):
            yield (head,) + tail


def nonprime_atom_witness(M: FgModule, c) -> Certificate:
    """A non-refinable instance in M built from a nonprime atom c.

    With c | a·b and c ∤ a, c ∤ b, pick x ∉ c·M. If a·(b·x) = c·((ab/c)·x)
    refines, the refining divisor is a unit, which forces b·x ∈ c·M; then
    b·x = c·(b·x/c) cannot refine without x ∈ c·M.
    """
    D = M.domain
    c = D.coerce(c)
    if not is_atom(D, c) or is_prime_element(D, c):
        raise InvalidArgumentError(f"{D.format(c)} is not a nonprime atom of {D}")
    a, b = zero_divisor_witness(D, c)
    x = next((v for v in M.basis_vectors() if M.divide(v, c) is None), None)
    if x is None:
        raise InternalError(f"every basis vector of {M} is divisible by {D.format(c)}")
    ab = D.exact_div(c, D.mul(a, b))
    first = find_refinement(Instance(D, M, a, c, M.scale(b, x), M.scale(ab, x)))
    if not first.found:
        return first
    bx = M.divide(M.scale(b, x), c)
    if bx is None:
        raise InternalError("a unit refining divisor did not put b·x into c·M")
    second = find_refinement(Instance(D, M, b, c, x, bx))
    if second.found:
        raise InternalError("an element outside c·M was divided by c")
    return second


@dataclass(frozen=True)
class ColonCheck:
    ideal: OIdeal
    generator: Optional[Any]

    @property
    def principal(self) -> bool:
        return self.generator is not None


def colon_principal_check(a, x, M: AnyModule) -> ColonCheck:
    """(aM : x) and a generator when it is principal."""
    I = colon_ideal(a, x, M)
    return ColonCheck(I, ideals.is_principal(I))
