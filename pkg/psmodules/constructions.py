"""
constructions.py – Splitting sets, content exponents, envelopes, classification
===============================================================================
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from psmodules import ideals
from psmodules.arith import (
    DomainDescriptor,
    ImagQuadOrder,
    Integers,
    Localized,
    elements_of_norm,
    is_atom,
    is_coprime,
    is_prime_element,
    size,
)
from psmodules.errors import InternalError, InvalidArgumentError, UnsupportedError
from psmodules.ideals import OIdeal
from psmodules.modules import (
    AnyModule,
    FgModule,
    FractionalModule,
    LocModuleView,
    is_primitive,
    scalar_divisors,
)
from psmodules.sampling import random_vector

log = logging.getLogger(__name__)


# ------------------------------------------------------------
# MULTIPLICATIVE SETS & SPLITTING
# ------------------------------------------------------------
@dataclass(frozen=True)
class MultiplicativeSet:
    domain: DomainDescriptor
    generators: Tuple[Any, ...]
    saturated: bool = False
    atom_verdicts: Tuple[Tuple[Any, bool], ...] = field(default=(), compare=False)

    def __post_init__(self):
        D = self.domain
        gens = tuple(D.normalize(D.coerce(g)) for g in self.generators)
        for g in gens:
            if D.is_zero(g) or D.is_unit(g):
                raise InvalidArgumentError(f"multiplicative set generator {D.format(g)} must be a nonzero nonunit")
        object.__setattr__(self, "generators", gens)

    @property
    def s(self):
        return self.domain.product(self.generators)

    def localized(self) -> Localized:
        return Localized(self.domain, self.generators)

    def to_dict(self) -> Dict[str, Any]:
        D = self.domain
        return {
            "domain": str(D),
            "generators": [D.format(g) for g in self.generators],
            "saturated": self.saturated,
            "atoms": [{"element": D.format(a), "prime": p} for a, p in self.atom_verdicts],
        }


def nonprime_atom_set(D: DomainDescriptor, norm_bound: int) -> MultiplicativeSet:
    """Multiplicative set generated by the nonprime atoms of norm <= norm_bound."""
    if norm_bound < 2:
        raise InvalidArgumentError("norm_bound must be at least 2")
    if not isinstance(D, (Integers, ImagQuadOrder)):
        raise UnsupportedError(f"atoms are enumerated only in Z and Z[w], not {D}")
    verdicts: List[Tuple[Any, bool]] = []
    for n in range(2, norm_bound + 1):
        for e in elements_of_norm(D, n):
            if is_atom(D, e):
                verdicts.append((e, is_prime_element(D, e)))
    gens = tuple(e for e, prime in verdicts if not prime)
    log.info(f"{D}: {len(verdicts)} atoms of norm <= {norm_bound}, {len(gens)} nonprime")
    return MultiplicativeSet(D, gens, False, tuple(verdicts))


@dataclass(frozen=True)
class SplitEntry:
    prime: Any
    passed: bool
    saturation: OIdeal


@dataclass(frozen=True)
class SplitReport:
    S: MultiplicativeSet
    entries: Tuple[SplitEntry, ...]

    @property
    def all_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_dict(self) -> Dict[str, Any]:
        D = self.S.domain
        return {
            "S": [D.format(g) for g in self.S.generators],
            "entries": [
                {"prime": D.format(e.prime), "passed": e.passed, "saturation": ideals.ideal_to_dict(e.saturation)}
                for e in self.entries
            ],
            "all_pass": self.all_pass,
        }


def splitting_check(S: MultiplicativeSet, primes: Sequence[Any]) -> SplitReport:
    """p·A_S ∩ A = p·A for every listed p, via saturation of (p) by the product of S."""
    D = S.domain
    entries = []
    for p in primes:
        p = D.coerce(p)
        principal = ideals.ideal_from_generators(D, [p])
        saturated = ideals.saturation(principal, S.s) if S.generators else principal
        passed = saturated == principal
        log.debug(f"splitting check {D.format(p)}: {'pass' if passed else 'fail'}")
        entries.append(SplitEntry(p, passed, saturated))
    return SplitReport(S, tuple(entries))


# ------------------------------------------------------------
# CONTENT & DEDEKIND–MERTENS
# ------------------------------------------------------------
@dataclass(frozen=True)
class Content:
    """Coefficients in ascending degree and the ideal they generate."""

    polynomial: Tuple[Any, ...]
    content_ideal: OIdeal


def content(D: DomainDescriptor, coeffs: Sequence[Any]) -> Content:
    coeffs = tuple(D.coerce(c) for c in coeffs)
    return Content(coeffs, ideals.ideal_from_generators(D, coeffs))


def _trim(D: DomainDescriptor, coeffs: Sequence[Any]) -> Tuple[Any, ...]:
    coeffs = [D.coerce(c) for c in coeffs]
    while coeffs and D.is_zero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs)


def poly_mul(D: DomainDescriptor, f: Sequence[Any], g: Sequence[Any]) -> Tuple[Any, ...]:
    out = [D.zero] * (len(f) + len(g) - 1)
    for i, p in enumerate(f):
        for j, q in enumerate(g):
            out[i + j] = D.add(out[i + j], D.mul(p, q))
    return tuple(out)


@dataclass(frozen=True)
class DMResult:
    m: int
    lhs: OIdeal
    rhs: OIdeal
    gauss_holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "lhs": ideals.ideal_to_dict(self.lhs),
            "rhs": ideals.ideal_to_dict(self.rhs),
            "gauss_holds": self.gauss_holds,
        }


def dedekind_mertens_exponent(D: DomainDescriptor, f: Sequence[Any], g: Sequence[Any]) -> DMResult:
    """Least m >= 1 with c(f)^m·c(fg) = c(f)^(m+1)·c(g)."""
    f, g = _trim(D, f), _trim(D, g)
    if not f or not g:
        raise InvalidArgumentError("content exponents need nonzero polynomials")
    cf = content(D, f).content_ideal
    cg = content(D, g).content_ideal
    cfg = content(D, poly_mul(D, f, g)).content_ideal
    gauss = cfg == ideals.product(cf, cg)
    bound = len(g)  # deg(g) + 1
    power_m = cf
    for m in range(1, bound + 1):
        lhs = ideals.product(power_m, cfg)
        rhs = ideals.product(ideals.product(power_m, cf), cg)
        if lhs == rhs:
            if m >= 2:
                prev = ideals.power(cf, m - 1)
                if ideals.product(prev, cfg) == ideals.product(ideals.product(prev, cf), cg):
                    raise InternalError(f"exponent {m} is not minimal")
            log.info(f"Dedekind-Mertens exponent {m} over {D} (gauss {'holds' if gauss else 'fails'})")
            return DMResult(m, lhs, rhs, gauss)
        power_m = ideals.product(power_m, cf)
    raise InternalError(f"no content exponent up to deg(g)+1 = {bound}; arithmetic is inconsistent")


# ------------------------------------------------------------
# PS ENVELOPES
# ------------------------------------------------------------
@dataclass(frozen=True)
class EnvelopeBounds:
    norm_bound: int = 9
    height: int = 1
    max_steps: int = 3

    @classmethod
    def from_config(cls, cfg: Dict[str, Any]) -> "EnvelopeBounds":
        section = cfg.get("envelope", {})
        return cls(
            int(section.get("norm_bound", cls.norm_bound)),
            int(section.get("height", cls.height)),
            int(section.get("max_steps", cls.max_steps)),
        )


@dataclass(frozen=True)
class EnvelopeResult:
    module: FractionalModule
    stabilized: bool
    steps: int
    adjoined: Tuple[Tuple[Tuple[Any, ...], int], ...]

    def to_dict(self) -> Dict[str, Any]:
        Q = self.module
        return {
            "module": str(Q),
            "stabilized": self.stabilized,
            "steps": self.steps,
            "adjoined": [Q.format_element(v, den) for v, den in self.adjoined],
        }


def _as_fractional(N) -> FractionalModule:
    if isinstance(N, FractionalModule):
        return N
    if isinstance(N, FgModule):
        return FractionalModule.of(N)
    raise InvalidArgumentError(f"cannot take the envelope of {N!r}")


def _ambient_contains(M: AnyModule, nums: Sequence[Any], den: int) -> bool:
    if den == 1:
        return M.contains(tuple(nums))
    if isinstance(M, LocModuleView):
        return M.divide(M.coerce(tuple(nums)), den) is not None
    return M.divide(tuple(nums), den) is not None


def _scalar_pairs(D: DomainDescriptor, norm_bound: int) -> List[Tuple[Any, Any]]:
    pool = [e for n in range(2, norm_bound + 1) for e in elements_of_norm(D, n)]
    return [(a, b) for a in pool for b in pool if is_coprime(D, a, b)]


def _envelope_additions(Q: FractionalModule, M: AnyModule, bounds: EnvelopeBounds) -> List[Tuple[Tuple[Any, ...], int]]:
    D = Q.domain
    vectors = Q.numerator.basis_vectors()
    found: List[Tuple[Tuple[Any, ...], int]] = []
    grown = Q
    if bounds.height <= 0:
        return found
    pairs = _scalar_pairs(D, bounds.norm_bound)
    for coeffs in itertools.product(range(-bounds.height, bounds.height + 1), repeat=len(vectors)):
        if not any(coeffs):
            continue
        x = tuple(D.zero for _ in range(Q.numerator.rank))
        for k, v in zip(coeffs, vectors):
            x = tuple(D.add(xi, D.mul(D.coerce(k), vi)) for xi, vi in zip(x, v))
        for a, b in pairs:
            # x/a written as x·conj(a) / (D_Q·N(a)); integer denominators only
            na = size(D, a)
            conj = a.conjugate() if isinstance(D, ImagQuadOrder) else 1
            nums = tuple(D.mul(xi, D.coerce(conj)) for xi in x)
            den = Q.denominator * na
            bnums = tuple(D.mul(b, n) for n in nums)
            if not Q.contains(bnums, den):
                continue
            if grown.contains(nums, den) or not _ambient_contains(M, nums, den):
                continue
            log.debug(f"envelope: adjoining {Q.format_element(nums, den)} via a={D.format(a)}, b={D.format(b)}")
            grown = grown.adjoin(nums, den)
            found.append((nums, den))
    return found


def _check_envelope_inputs(N, M: AnyModule) -> FractionalModule:
    Q = _as_fractional(N)
    D = Q.domain
    if not D.flags.is_weak_gcd:
        raise UnsupportedError(f"envelopes need a weak GCD domain, {D} is not one")
    if Q.numerator.rank != M.rank or Q.domain != M.domain:
        raise InvalidArgumentError("the module and its ambient differ in ring or rank")
    for v, den in Q.generators():
        if not _ambient_contains(M, v, den):
            raise InvalidArgumentError(f"{Q.format_element(v, den)} is not in the ambient module")
    return Q


def ps_envelope_step(N, M: AnyModule, bounds: EnvelopeBounds) -> FractionalModule:
    """Adjoin every x/a with x ∈ N, b·x ∈ a·N, (a, b) coprime, within bounds."""
    Q = _check_envelope_inputs(N, M)
    for nums, den in _envelope_additions(Q, M, bounds):
        Q = Q.adjoin(nums, den)
    return Q


def ps_envelope(N, M: AnyModule, bounds: EnvelopeBounds) -> EnvelopeResult:
    """Iterate the step until nothing is added or ``max_steps`` is spent.

    An empty search space never certifies stability.
    """
    Q = _check_envelope_inputs(N, M)
    empty = bounds.height <= 0 or not _scalar_pairs(Q.domain, bounds.norm_bound)
    if empty:
        return EnvelopeResult(Q, False, 0, ())
    adjoined: List[Tuple[Tuple[Any, ...], int]] = []
    for step in range(bounds.max_steps + 1):
        additions = _envelope_additions(Q, M, bounds)
        if not additions:
            log.info(f"envelope stabilized after {step} steps")
            return EnvelopeResult(Q, True, step, tuple(adjoined))
        if step == bounds.max_steps:
            break
        for nums, den in additions:
            Q = Q.adjoin(nums, den)
        adjoined.extend(additions)
    log.warning(f"envelope still growing after {bounds.max_steps} steps")
    return EnvelopeResult(Q, False, bounds.max_steps, tuple(adjoined))


# ------------------------------------------------------------
# ATOMIC / FACTORABLE CLASSIFICATION
# ------------------------------------------------------------
HOLDS = "holds on sample"
HOLDS_BY_ACCP = "holds: finitely generated over an accp base"
REFUTED = "refuted"
VACUOUS = "vacuous"


@dataclass
class ClassificationReport:
    atomic: str
    factorable: str
    witnesses: List[Dict[str, Any]] = field(default_factory=list)
    sampled: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "atomic": self.atomic,
            "factorable": self.factorable,
            "sampled": self.sampled,
            "witnesses": self.witnesses,
        }


def atom_divisor(x, M: FgModule) -> Tuple[Any, Any]:
    """(scalar, atom) with x = scalar·atom and atom irreducible in M."""
    D = M.domain
    scalar, current = D.one, M.coerce(x)
    while True:
        divs = scalar_divisors(current, M)
        if not divs:
            return scalar, current
        t = divs[-1]
        current = M.divide(current, t)
        scalar = D.mul(scalar, t)


def classify_module_sample(
    M: FgModule,
    sample_budget: int,
    rng: Optional[np.random.Generator] = None,
    height: int = 3,
) -> ClassificationReport:
    """Atomic and factorable verdicts for M.

    Atomicity is settled by the base domain when it satisfies ACCP; otherwise
    both verdicts only describe the sampled elements and are never a proof.
    """
    if not isinstance(M, FgModule):
        raise UnsupportedError("classification samples finitely generated modules over Z or Z[w]")
    if not M.basis:
        return ClassificationReport(VACUOUS, VACUOUS)
    rng = rng if rng is not None else np.random.default_rng()
    # x = t·x₁ = t·t₁·x₂ ... is an ascending chain of cyclic submodules, finite under ACCP
    atomic = HOLDS_BY_ACCP if M.domain.flags.is_accp else HOLDS
    report = ClassificationReport(atomic, HOLDS)
    for _ in range(sample_budget):
        x = random_vector(M, rng, height)
        if M.is_zero(x):
            continue
        report.sampled += 1
        scalar, atom = atom_divisor(x, M)
        primitive = is_primitive(atom, M)
        if not primitive and report.factorable == HOLDS:
            report.factorable = REFUTED
            report.witnesses.append(
                {
                    "element": M.format_vector(x),
                    "atom": M.format_vector(atom),
                    "scalar": M.domain.format(scalar),
                    "primitive": False,
                }
            )
    if report.sampled == 0:
        report.factorable = VACUOUS
        if report.atomic == HOLDS:
            report.atomic = VACUOUS
    log.info(f"classified {M}: atomic {report.atomic}, factorable {report.factorable}")
    return report
