"""
ideals.py – Finitely generated ideals of Z and Z[w]
===================================================

An ideal is stored as its Z-lattice of integer coordinates in canonical
Hermite normal form. Closure under multiplication by w is enforced when the
lattice is built (each generator contributes g and g·w), so sums, products,
intersections and colons are plain integer linear algebra.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Tuple

from psmodules import lattice
from psmodules.arith import (
    DomainDescriptor,
    ImagQuadOrder,
    Integers,
    ResidueRing,
    elements_of_norm,
)
from psmodules.config import SATURATION_CAP
from psmodules.errors import (
    BoundExceededError,
    DomainMismatchError,
    InvalidArgumentError,
    UnsupportedError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class OIdeal:
    domain: DomainDescriptor
    basis: lattice.Basis
    generators: Tuple[Any, ...] = field(default=(), compare=False)

    def is_zero(self) -> bool:
        return not self.basis

    def is_unit_ideal(self) -> bool:
        return len(self.basis) == self.domain.degree and lattice.determinant(self.basis, self.domain.degree) == 1

    def basis_elements(self) -> List[Any]:
        return [self.domain.from_coords(c) for c in self.basis]

    def __contains__(self, e) -> bool:
        return membership(e, self)

    def __str__(self) -> str:
        gens = self.generators or tuple(self.basis_elements())
        return "(" + ", ".join(self.domain.format(g) for g in gens) + ")"


def _require_lattice_domain(D: DomainDescriptor) -> None:
    if not isinstance(D, (Integers, ImagQuadOrder)):
        raise UnsupportedError(f"ideals are represented as lattices only over Z and Z[w], not {D}")


def _closure_columns(D: DomainDescriptor, gens: Iterable[Any]) -> List[Tuple[int, ...]]:
    return [D.coords(D.mul(g, r)) for g in gens for r in D.ring_basis()]


# ------------------------------------------------------------
# CONSTRUCTION & MEMBERSHIP
# ------------------------------------------------------------
def ideal_from_generators(D: DomainDescriptor, gens: Iterable[Any]) -> OIdeal:
    _require_lattice_domain(D)
    gens = tuple(D.coerce(g) for g in gens)
    return OIdeal(D, lattice.hnf(_closure_columns(D, gens), D.degree), gens)


def ideal_from_basis(D: DomainDescriptor, columns: Iterable[Tuple[int, ...]]) -> OIdeal:
    """Ideal generated by the elements whose coordinates are ``columns``."""
    return ideal_from_generators(D, [D.from_coords(c) for c in columns])


def unit_ideal(D: DomainDescriptor) -> OIdeal:
    return ideal_from_generators(D, [D.one])


def zero_ideal(D: DomainDescriptor) -> OIdeal:
    return ideal_from_generators(D, [])


def membership(e, I: OIdeal) -> bool:
    e = I.domain.coerce(e)
    return lattice.contains(I.basis, I.domain.coords(e))


def _check_same(I: OIdeal, J: OIdeal) -> None:
    if I.domain != J.domain:
        raise DomainMismatchError(f"ideals over {I.domain} and {J.domain}")


# ------------------------------------------------------------
# ARITHMETIC
# ------------------------------------------------------------
def ideal_sum(I: OIdeal, J: OIdeal) -> OIdeal:
    _check_same(I, J)
    return ideal_from_generators(I.domain, I.basis_elements() + J.basis_elements())


def product(I: OIdeal, J: OIdeal) -> OIdeal:
    _check_same(I, J)
    D = I.domain
    return ideal_from_generators(D, [D.mul(g, h) for g in I.basis_elements() for h in J.basis_elements()])


def power(I: OIdeal, k: int) -> OIdeal:
    if k < 0:
        raise InvalidArgumentError("ideal powers need k >= 0")
    result = unit_ideal(I.domain)
    for _ in range(k):
        result = product(result, I)
    return result


def intersection(I: OIdeal, J: OIdeal) -> OIdeal:
    _check_same(I, J)
    return ideal_from_basis(I.domain, lattice.intersect(I.basis, J.basis, I.domain.degree))


def _colon_element(I: OIdeal, g) -> lattice.Basis:
    """Coordinates of {t : t·g ∈ I}."""
    D = I.domain
    phi = lattice.matrix_columns(D.mult_matrix(g))
    return lattice.preimage(phi, I.basis, D.degree)


def colon(I: OIdeal, J: OIdeal) -> OIdeal:
    """(I : J) = {t : t·J ⊆ I}."""
    _check_same(I, J)
    D = I.domain
    if J.is_zero():
        return unit_ideal(D)
    basis: Optional[lattice.Basis] = None
    for g in J.basis_elements():
        part = _colon_element(I, g)
        basis = part if basis is None else lattice.intersect(basis, part, D.degree)
    return ideal_from_basis(D, basis or ())


def saturation_steps(I: OIdeal, s) -> Tuple[OIdeal, int]:
    """(I : s^n) together with the first n at which the colon chain is stable."""
    D = I.domain
    s = D.coerce(s)
    if D.is_zero(s):
        raise InvalidArgumentError("cannot saturate by zero")
    if D.is_unit(s):
        return I, 0
    current = I
    for n in range(SATURATION_CAP + 1):
        nxt = ideal_from_basis(D, _colon_element(current, s))
        if nxt == current:
            return current, n
        current = nxt
    raise BoundExceededError(f"saturation of {I} by {D.format(s)} did not stabilize in {SATURATION_CAP} steps")


def saturation(I: OIdeal, s) -> OIdeal:
    """Union of the colons (I : s^k)."""
    return saturation_steps(I, s)[0]


# ------------------------------------------------------------
# NORM & PRINCIPALITY
# ------------------------------------------------------------
def ideal_norm(I: OIdeal) -> int:
    """Lattice index [O : I]."""
    if I.is_zero():
        raise InvalidArgumentError("the zero ideal has no norm")
    return lattice.determinant(I.basis, I.domain.degree)


def is_principal(I: OIdeal) -> Optional[Any]:
    """A generator of I, or None.

    An element of I whose norm equals [O : I] generates I, and every
    generator has that norm, so scanning the finitely many elements of that
    norm decides principality.
    """
    if I.is_zero():
        raise InvalidArgumentError("principality of the zero ideal is not asked")
    D = I.domain
    n = ideal_norm(I)
    for alpha in elements_of_norm(D, n):
        if membership(alpha, I):
            log.debug(f"{I} is generated by {D.format(alpha)}")
            return alpha
    return None


def is_prime_ideal(I: OIdeal) -> bool:
    """Nonzero primes are maximal here, so this is the residue-field test."""
    if I.is_zero():
        return True
    if I.is_unit_ideal():
        return False
    return ResidueRing(I.domain, I.basis).is_field()


def ideal_to_dict(I: OIdeal) -> Dict[str, Any]:
    D = I.domain
    gens = I.generators or tuple(I.basis_elements())
    return {
        "generators": [D.format(g) for g in gens],
        "hnf_basis": [list(c) for c in I.basis],
        "norm": 0 if I.is_zero() else ideal_norm(I),
    }
