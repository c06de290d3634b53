"""
modules.py – Finitely generated torsion-free modules
====================================================

``FgModule``          a submodule of A^n stored as a Z-lattice of rank <= n·deg
                      in canonical Hermite normal form (w-closed like ideals)
``LocModuleView``     M_S = M ⊗ A_S with elements ``LocVector(nums, exps)``;
                      every question is answered by saturating base lattices
``FractionalModule``  (1/D)·L ⊆ K^n with D a positive integer, for modules that
                      leave A^n (envelopes)
"""

import functools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, List, Optional, Sequence, Tuple, Union

from psmodules import lattice
from psmodules.arith import (
    DomainDescriptor,
    ImagQuadOrder,
    Integers,
    Localized,
    SFraction,
    common_divisors,
)
from psmodules.config import SATURATION_CAP
from psmodules.errors import (
    BoundExceededError,
    DomainMismatchError,
    InvalidArgumentError,
    InvalidDivisorError,
    UnsupportedError,
)
from psmodules.ideals import OIdeal, ideal_from_basis

log = logging.getLogger(__name__)

Vector = Tuple[Any, ...]


# ------------------------------------------------------------
# VECTORS OVER A
# ------------------------------------------------------------
def scale_vector(D: DomainDescriptor, a, x: Sequence[Any]) -> Vector:
    return tuple(D.mul(a, xi) for xi in x)


def divide_vector(D: DomainDescriptor, a, x: Sequence[Any]) -> Optional[Vector]:
    """x/a coordinate-wise in A^n, or None."""
    out = []
    for xi in x:
        q = D.exact_div(a, xi)
        if q is None:
            return None
        out.append(q)
    return tuple(out)


def _vector_coords(D: DomainDescriptor, x: Sequence[Any]) -> Tuple[int, ...]:
    return tuple(c for xi in x for c in D.coords(xi))


def _vector_from_coords(D: DomainDescriptor, c: Sequence[int], rank: int) -> Vector:
    k = D.degree
    return tuple(D.from_coords(c[i * k:(i + 1) * k]) for i in range(rank))


def _scalar_action(D: DomainDescriptor, s, rank: int) -> Tuple[lattice.Column, ...]:
    """Columns of the integer matrix of v ↦ s·v on (A^rank)-coordinates."""
    return lattice.matrix_columns(lattice.block_diagonal([D.mult_matrix(s)] * rank))


# ------------------------------------------------------------
# FINITELY GENERATED MODULES
# ------------------------------------------------------------
@dataclass(frozen=True)
class FgModule:
    domain: DomainDescriptor
    rank: int
    basis: lattice.Basis
    generators: Tuple[Vector, ...] = field(default=(), compare=False)

    @property
    def dim(self) -> int:
        return self.rank * self.domain.degree

    def coerce(self, x) -> Vector:
        if not isinstance(x, (tuple, list)):
            x = (x,)
        if len(x) != self.rank:
            raise DomainMismatchError(f"vector of length {len(x)} in a module of ambient rank {self.rank}")
        return tuple(self.domain.coerce(xi) for xi in x)

    def coords(self, x) -> Tuple[int, ...]:
        return _vector_coords(self.domain, self.coerce(x))

    def vector(self, c: Sequence[int]) -> Vector:
        return _vector_from_coords(self.domain, c, self.rank)

    def basis_vectors(self) -> List[Vector]:
        return [self.vector(c) for c in self.basis]

    def contains(self, x) -> bool:
        return lattice.contains(self.basis, self.coords(x))

    def is_zero(self, x) -> bool:
        return all(self.domain.is_zero(xi) for xi in self.coerce(x))

    def equal(self, x, y) -> bool:
        return all(self.domain.eq(a, b) for a, b in zip(self.coerce(x), self.coerce(y)))

    def scale(self, a, x) -> Vector:
        return scale_vector(self.domain, self.domain.coerce(a), self.coerce(x))

    def add(self, x, y) -> Vector:
        return tuple(self.domain.add(a, b) for a, b in zip(self.coerce(x), self.coerce(y)))

    def divide(self, x, a) -> Optional[Vector]:
        """x/a when it lies in M."""
        a = self.domain.coerce(a)
        if self.domain.is_zero(a):
            raise InvalidDivisorError("division by zero")
        q = divide_vector(self.domain, a, self.coerce(x))
        if q is None or not self.contains(q):
            return None
        return q

    def format_vector(self, x) -> str:
        return "(" + ",".join(self.domain.format(xi) for xi in self.coerce(x)) + ")"

    def __str__(self) -> str:
        gens = self.generators or tuple(self.basis_vectors())
        return f"rank {self.rank} gens [" + ",".join(self.format_vector(g) for g in gens) + "]"


def module_from_generators(D: DomainDescriptor, rank: int, gens: Sequence[Any]) -> FgModule:
    """Submodule of A^rank generated by ``gens`` (w-closed before reduction)."""
    if not isinstance(D, (Integers, ImagQuadOrder)):
        raise UnsupportedError(f"modules are lattices only over Z and Z[w], not {D}")
    if rank < 1:
        raise InvalidArgumentError("ambient rank must be positive")
    shell = FgModule(D, rank, ())
    vectors = tuple(shell.coerce(g) for g in gens)
    cols = [
        _vector_coords(D, scale_vector(D, r, g))
        for g in vectors
        for r in D.ring_basis()
    ]
    return FgModule(D, rank, lattice.hnf(cols, rank * D.degree), vectors)


def module_from_basis(D: DomainDescriptor, rank: int, columns: Sequence[lattice.Column]) -> FgModule:
    return module_from_generators(D, rank, [_vector_from_coords(D, c, rank) for c in columns])


def free_module(D: DomainDescriptor, rank: int) -> FgModule:
    gens = [tuple(D.one if i == j else D.zero for i in range(rank)) for j in range(rank)]
    return module_from_generators(D, rank, gens)


def scale_module(a, M: FgModule) -> FgModule:
    """a·M."""
    a = M.domain.coerce(a)
    return module_from_generators(M.domain, M.rank, [M.scale(a, g) for g in M.basis_vectors()])


def direct_sum(M: "AnyModule", N: "AnyModule") -> "AnyModule":
    if isinstance(M, LocModuleView) or isinstance(N, LocModuleView):
        if not (isinstance(M, LocModuleView) and isinstance(N, LocModuleView)):
            raise DomainMismatchError("cannot add a localized and an unlocalized module")
        if M.s_generators != N.s_generators:
            raise DomainMismatchError("direct sums need the same multiplicative set")
        return LocModuleView(direct_sum(M.base, N.base), M.s_generators)
    if M.domain != N.domain:
        raise DomainMismatchError(f"modules over {M.domain} and {N.domain}")
    D = M.domain
    zm = tuple(D.zero for _ in range(M.rank))
    zn = tuple(D.zero for _ in range(N.rank))
    gens = [tuple(g) + zn for g in M.basis_vectors()] + [zm + tuple(h) for h in N.basis_vectors()]
    return module_from_generators(D, M.rank + N.rank, gens)


# ------------------------------------------------------------
# SATURATION
# ------------------------------------------------------------
@functools.lru_cache(maxsize=1024)
def saturated_lattice(M: FgModule, a, s) -> Tuple[lattice.Basis, int]:
    """Basis of sat(a·M, s) and the step count n with sⁿ·sat(a·M, s) ⊆ a·M."""
    D = M.domain
    current = scale_module(a, M).basis
    if D.is_unit(s):
        return current, 0
    phi = _scalar_action(D, s, M.rank)
    for n in range(SATURATION_CAP + 1):
        nxt = lattice.preimage(phi, current, M.dim)
        if nxt == current:
            return current, n
        current = nxt
    raise BoundExceededError(f"module saturation by {D.format(s)} did not stabilize in {SATURATION_CAP} steps")


def module_saturation(M: FgModule, s) -> FgModule:
    s = M.domain.coerce(s)
    if M.domain.is_zero(s):
        raise InvalidArgumentError("cannot saturate by zero")
    basis, _ = saturated_lattice(M, M.domain.one, s)
    return module_from_basis(M.domain, M.rank, basis)


# ------------------------------------------------------------
# LOCALIZED VIEWS
# ------------------------------------------------------------
@dataclass(frozen=True)
class LocVector:
    """nums / prod(s_i^exps[i])."""

    nums: Tuple[Any, ...]
    exps: Tuple[int, ...]


@dataclass(frozen=True)
class LocModuleView:
    base: FgModule
    s_generators: Tuple[Any, ...] = ()

    def __post_init__(self):
        local = Localized(self.base.domain, tuple(self.s_generators))
        object.__setattr__(self, "s_generators", local.s_generators)

    @cached_property
    def local_domain(self) -> Localized:
        return Localized(self.base.domain, self.s_generators)

    @property
    def domain(self) -> DomainDescriptor:
        return self.base.domain

    @property
    def rank(self) -> int:
        return self.base.rank

    @property
    def s(self):
        return self.local_domain.s

    def make(self, nums: Sequence[Any], exps: Sequence[int]) -> LocVector:
        """Reduced vector: no generator with positive exponent divides every entry."""
        D = self.domain
        nums = self.base.coerce(tuple(nums))
        exps = [int(e) for e in exps]
        if len(exps) != len(self.s_generators) or any(e < 0 for e in exps):
            raise InvalidArgumentError(f"bad denominator exponents {exps}")
        if all(D.is_zero(n) for n in nums):
            return LocVector(nums, tuple(0 for _ in exps))
        for i, g in enumerate(self.s_generators):
            while exps[i] > 0:
                q = divide_vector(D, g, nums)
                if q is None:
                    break
                nums = q
                exps[i] -= 1
        return LocVector(nums, tuple(exps))

    def coerce(self, x) -> LocVector:
        if isinstance(x, LocVector):
            return self.make(x.nums, x.exps)
        if not isinstance(x, (tuple, list)):
            x = (x,)
        if any(isinstance(xi, SFraction) for xi in x):
            L = self.local_domain
            entries = [L.coerce(xi) for xi in x]
            top = [max(col) for col in zip(*(e.exps for e in entries))] if entries else []
            nums = [
                self.domain.mul(e.num, L.monomial([t - k for t, k in zip(top, e.exps)]))
                for e in entries
            ]
            return self.make(nums, top)
        return self.make(x, [0] * len(self.s_generators))

    def entries(self, x) -> List[SFraction]:
        x = self.coerce(x)
        return [self.local_domain.make(n, x.exps) for n in x.nums]

    def contains(self, x) -> bool:
        basis, _ = saturated_lattice(self.base, self.domain.one, self.s)
        return lattice.contains(basis, self.base.coords(self.coerce(x).nums))

    def is_zero(self, x) -> bool:
        return all(self.domain.is_zero(n) for n in self.coerce(x).nums)

    def equal(self, x, y) -> bool:
        x, y = self.coerce(x), self.coerce(y)
        L = self.local_domain
        lhs = scale_vector(self.domain, L.monomial(y.exps), x.nums)
        rhs = scale_vector(self.domain, L.monomial(x.exps), y.nums)
        return all(self.domain.eq(a, b) for a, b in zip(lhs, rhs))

    def scale(self, a, x) -> LocVector:
        x = self.coerce(x)
        if isinstance(a, SFraction):
            a = self.local_domain.coerce(a)
            nums = scale_vector(self.domain, a.num, x.nums)
            return self.make(nums, [i + j for i, j in zip(x.exps, a.exps)])
        return self.make(scale_vector(self.domain, self.domain.coerce(a), x.nums), x.exps)

    def add(self, x, y) -> LocVector:
        x, y = self.coerce(x), self.coerce(y)
        L = self.local_domain
        top = [max(i, j) for i, j in zip(x.exps, y.exps)]
        xs = scale_vector(self.domain, L.monomial([t - i for t, i in zip(top, x.exps)]), x.nums)
        ys = scale_vector(self.domain, L.monomial([t - j for t, j in zip(top, y.exps)]), y.nums)
        return self.make([self.domain.add(p, q) for p, q in zip(xs, ys)], top)

    def divide(self, x, a) -> Optional[LocVector]:
        """x/a in M_S, for a in A or in A_S."""
        x = self.coerce(x)
        D = self.domain
        if isinstance(a, SFraction):
            a = self.local_domain.coerce(a)
            if D.is_zero(a.num):
                raise InvalidDivisorError("division by zero")
            x = self.make(scale_vector(D, self.local_domain.monomial(a.exps), x.nums), x.exps)
            a = a.num
        a = D.coerce(a)
        if D.is_zero(a):
            raise InvalidDivisorError("division by zero")
        basis, steps = saturated_lattice(self.base, a, self.s)
        if not lattice.contains(basis, self.base.coords(x.nums)):
            return None
        lifted = scale_vector(D, D.power(self.s, steps), x.nums)
        w = divide_vector(D, a, lifted)
        if w is None:
            raise BoundExceededError(f"saturation step count {steps} does not clear the denominator")
        return self.make(w, [e + steps for e in x.exps])

    def format_vector(self, x) -> str:
        L = self.local_domain
        return "(" + ",".join(L.format(e) for e in self.entries(x)) + ")"

    def __str__(self) -> str:
        gens = ", ".join(self.domain.format(g) for g in self.s_generators)
        return f"{self.base} loc by [{gens}]"


AnyModule = Union[FgModule, LocModuleView]


# ------------------------------------------------------------
# MODULE OPERATIONS
# ------------------------------------------------------------
def module_membership(x, M: AnyModule) -> bool:
    if not isinstance(x, LocVector):
        seq = x if isinstance(x, (tuple, list)) else (x,)
        if len(seq) != M.rank:
            raise DomainMismatchError(f"vector of length {len(seq)} tested against rank {M.rank}")
    return M.contains(x)


def divide_in_module(x, a, M: AnyModule):
    """x/a if it lies in M, else None."""
    return M.divide(x, a)


def colon_ideal(a, x, M: AnyModule) -> OIdeal:
    """(a·M : x) = {t ∈ A : t·x ∈ a·M}."""
    D = M.domain
    a = D.coerce(a)
    if D.is_zero(a):
        raise InvalidArgumentError("colon ideal needs a nonzero scalar")
    if M.is_zero(x):
        raise InvalidArgumentError("colon ideal needs a nonzero vector")
    if not M.contains(x):
        raise InvalidArgumentError(f"{M.format_vector(M.coerce(x))} is not in the module")
    if isinstance(M, LocModuleView):
        nums = M.coerce(x).nums
        target, _ = saturated_lattice(M.base, a, M.s)
        base = M.base
    else:
        nums = M.coerce(x)
        target = scale_module(a, M).basis
        base = M
    phi = [base.coords(scale_vector(D, r, nums)) for r in D.ring_basis()]
    result = ideal_from_basis(D, lattice.preimage(phi, target, D.degree))
    if a not in result:
        raise BoundExceededError(f"colon ideal {result} lost the scalar {D.format(a)}")
    return result


def scalar_divisors(x, M: AnyModule) -> List[Any]:
    """Nonunit scalars a with x/a ∈ M, ascending; a ranges over common
    divisors of the coordinates of x since x/a ∈ M ⊆ A^n."""
    D = M.domain
    if isinstance(M, LocModuleView):
        if M.s_generators:
            return list(M.s_generators)
        return scalar_divisors(M.coerce(x).nums, M.base)
    x = M.coerce(x)
    if not M.contains(x):
        raise InvalidArgumentError(f"{M.format_vector(x)} is not in the module")
    entries = [xi for xi in x if not D.is_zero(xi)]
    if not entries:
        raise InvalidArgumentError("the zero vector has every scalar as divisor")
    candidates = common_divisors(D, entries[0], entries[0])
    for e in entries[1:]:
        candidates = [c for c in candidates if D.exact_div(c, e) is not None]
    return [c for c in candidates if not D.is_unit(c) and M.divide(x, c) is not None]


def is_irreducible_element(x, M: AnyModule) -> bool:
    """Only units divide x inside M."""
    return not scalar_divisors(x, M)


def is_primitive(x, M: AnyModule) -> bool:
    """M/Ax is torsion-free, i.e. Kx ∩ M = Ax."""
    if isinstance(M, LocModuleView):
        if M.s_generators:
            # x/s lies in Kx ∩ M_S but not in Ax
            return False
        return is_primitive(M.coerce(x).nums, M.base)
    x = M.coerce(x)
    if M.is_zero(x) or not M.contains(x):
        raise InvalidArgumentError("is_primitive needs a nonzero element of the module")
    D = M.domain
    cyclic = [M.coords(scale_vector(D, r, x)) for r in D.ring_basis()]
    return lattice.span_saturation(M.basis, cyclic, M.dim) == lattice.hnf(cyclic, M.dim)


def is_pure_submodule(N: FgModule, M: FgModule) -> bool:
    """N ⊆ M with M/N torsion-free."""
    if N.domain != M.domain or N.rank != M.rank:
        raise DomainMismatchError("submodule check across different ambient spaces")
    if not lattice.is_sublattice(N.basis, M.basis):
        return False
    return lattice.span_saturation(M.basis, N.basis, M.dim) == N.basis


def is_rd_submodule(N: FgModule, M: FgModule, scalars: Sequence[Any]) -> bool:
    """a·M ∩ N = a·N for every listed scalar a."""
    if not lattice.is_sublattice(N.basis, M.basis):
        return False
    for a in scalars:
        aM = scale_module(a, M).basis
        if lattice.intersect(aM, N.basis, M.dim) != scale_module(a, N).basis:
            return False
    return True


# ------------------------------------------------------------
# FRACTIONAL MODULES
# ------------------------------------------------------------
@dataclass(frozen=True)
class FractionalModule:
    """(1/denominator)·numerator, canonical when gcd(denominator, entries) = 1."""

    denominator: int
    numerator: FgModule

    @classmethod
    def of(cls, M: FgModule) -> "FractionalModule":
        return cls.canonical(1, M)

    @classmethod
    def canonical(cls, denominator: int, numerator: FgModule) -> "FractionalModule":
        g = denominator
        for col in numerator.basis:
            for v in col:
                g = math.gcd(g, v)
        if g > 1:
            cols = [tuple(v // g for v in col) for col in numerator.basis]
            numerator = module_from_basis(numerator.domain, numerator.rank, cols)
            denominator //= g
        return cls(denominator, numerator)

    @property
    def domain(self) -> DomainDescriptor:
        return self.numerator.domain

    def contains(self, nums: Sequence[Any], den: int) -> bool:
        """nums/den ∈ (1/D)·L  ⇔  D·nums ∈ den·L."""
        scaled = [self.denominator * c for c in self.numerator.coords(nums)]
        if any(c % den for c in scaled):
            return False
        return lattice.contains(self.numerator.basis, [c // den for c in scaled])

    def includes(self, other: "FractionalModule") -> bool:
        return all(self.contains(v, other.denominator) for v in other.numerator.basis_vectors())

    def adjoin(self, nums: Sequence[Any], den: int) -> "FractionalModule":
        D = self.domain
        top = self.denominator * den // math.gcd(self.denominator, den)
        old = [scale_vector(D, top // self.denominator, v) for v in self.numerator.basis_vectors()]
        new = scale_vector(D, top // den, self.numerator.coerce(nums))
        return FractionalModule.canonical(top, module_from_generators(D, self.numerator.rank, old + [new]))

    def generators(self) -> List[Tuple[Vector, int]]:
        return [(v, self.denominator) for v in self.numerator.basis_vectors()]

    def format_element(self, nums: Sequence[Any], den: int) -> str:
        D = self.domain
        parts = []
        for n in self.numerator.coerce(nums):
            text = D.format(n)
            if den != 1:
                if any(ch in "+-" for ch in text[1:]):
                    text = f"({text})"
                text = f"{text}/{den}"
            parts.append(text)
        return "(" + ",".join(parts) + ")"

    def __str__(self) -> str:
        gens = ",".join(self.format_element(v, d) for v, d in self.generators())
        return f"rank {self.numerator.rank} gens [{gens}]"
