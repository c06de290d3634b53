"""
arith.py – Test-bed domains and exact element arithmetic
========================================================

Four kinds of integral domain are supported:

- ``Integers``          elements are Python ints
- ``ImagQuadOrder(m)``  Z[w] with w² = -m, elements are ``QuadInt(u, v, m)``
- ``PolyOverRationals`` Q[x], elements are sympy ``Poly`` over QQ
- ``Localized(base, S)`` A_S, elements are ``SFraction(num, exps)``

A domain object carries the arithmetic (add, mul, exact division, unit
normalization, integer coordinates) and its capability flags. The
module-level functions below implement divisibility, divisor enumeration,
common divisors and atom/prime classification on top of it.

Associates are normalized: positive in Z, (u > 0) or (u = 0 and v > 0) in
Z[w], monic in Q[x].
"""

import functools
import itertools
import logging
import math
import numbers
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Iterator, List, Optional, Sequence, Tuple

from sympy import Poly, QQ, Symbol, divisors, factorint, isprime
from sympy.ntheory import is_quad_residue

from psmodules import lattice
from psmodules.config import RESIDUE_BRUTEFORCE_LIMIT
from psmodules.errors import (
    DomainMismatchError,
    InternalError,
    InvalidArgumentError,
    InvalidDivisorError,
    UnsupportedError,
)

log = logging.getLogger(__name__)

X = Symbol("x")

# Z[√-m] localized at an element of even norm becomes a PID for these m:
# the maximal-order class group is trivial or generated by a prime above 2.
PID_AFTER_INVERTING_TWO = frozenset({2, 3, 5, 6, 7, 10, 11, 13, 15, 19, 22, 37, 43, 58, 67, 163})


# -------------------------
# CAPABILITY FLAGS
# -------------------------
@dataclass(frozen=True)
class DomainFlags:
    is_ufd: bool = False
    is_pid: bool = False
    is_bezout: bool = False
    is_gcd: bool = False
    is_weak_gcd: bool = False
    is_accp: bool = False
    is_atomic: bool = False

    def __post_init__(self):
        chain = [
            (self.is_pid, self.is_bezout, "pid implies bezout"),
            (self.is_pid, self.is_ufd, "pid implies ufd"),
            (self.is_ufd, self.is_gcd, "ufd implies gcd"),
            (self.is_bezout, self.is_gcd, "bezout implies gcd"),
            (self.is_gcd, self.is_weak_gcd, "gcd implies weak gcd"),
            (self.is_accp, self.is_weak_gcd, "accp implies weak gcd"),
            (self.is_accp, self.is_atomic, "accp implies atomic"),
        ]
        for premise, conclusion, rule in chain:
            if premise and not conclusion:
                raise InternalError(f"inconsistent domain flags: {rule}")

    @classmethod
    def all_true(cls) -> "DomainFlags":
        return cls(True, True, True, True, True, True, True)

    def as_dict(self) -> dict:
        return {
            "is_ufd": self.is_ufd,
            "is_pid": self.is_pid,
            "is_bezout": self.is_bezout,
            "is_gcd": self.is_gcd,
            "is_weak_gcd": self.is_weak_gcd,
            "is_accp": self.is_accp,
            "is_atomic": self.is_atomic,
        }


NOETHERIAN_NON_UFD = DomainFlags(is_weak_gcd=True, is_accp=True, is_atomic=True)


# -------------------------
# ELEMENT TYPES
# -------------------------
@dataclass(frozen=True)
class QuadInt:
    """u + v·w in Z[w], w² = -m."""

    u: int
    v: int
    m: int

    def _coerce(self, other) -> Optional["QuadInt"]:
        if isinstance(other, QuadInt):
            if other.m != self.m:
                raise DomainMismatchError(f"cannot mix Z[w,-{self.m}] and Z[w,-{other.m}]")
            return other
        if isinstance(other, int):
            return QuadInt(int(other), 0, self.m)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.u + o.u, self.v + o.v, self.m)

    __radd__ = __add__

    def __neg__(self):
        return QuadInt(-self.u, -self.v, self.m)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadInt(self.u - o.u, self.v - o.v, self.m)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadInt(
            self.u * o.u - self.m * self.v * o.v,
            self.u * o.v + self.v * o.u,
            self.m,
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = QuadInt(1, 0, self.m)
        for _ in range(k):
            result = result * self
        return result

    def __bool__(self):
        return bool(self.u or self.v)

    def conjugate(self) -> "QuadInt":
        return QuadInt(self.u, -self.v, self.m)

    def norm(self) -> int:
        return self.u * self.u + self.m * self.v * self.v


@dataclass(frozen=True)
class SFraction:
    """num / prod(s_i^exps[i]) in a localized domain."""

    num: Any
    exps: Tuple[int, ...]


# -------------------------
# DOMAINS
# -------------------------
class DomainDescriptor:
    """Common arithmetic interface of the test-bed domains."""

    kind: str = "abstract"
    degree: int = 1  # integer coordinates per element
    enumerable: bool = False

    @property
    def flags(self) -> DomainFlags:
        raise NotImplementedError

    @property
    def zero(self):
        return self.coerce(0)

    @property
    def one(self):
        return self.coerce(1)

    # --- element plumbing ---
    def coerce(self, value):
        raise NotImplementedError

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def is_zero(self, a) -> bool:
        return not a

    def eq(self, a, b) -> bool:
        return self.is_zero(self.sub(a, b))

    def power(self, a, k: int):
        result = self.one
        for _ in range(k):
            result = self.mul(result, a)
        return result

    def product(self, items: Iterable):
        result = self.one
        for item in items:
            result = self.mul(result, item)
        return result

    def is_unit(self, a) -> bool:
        raise NotImplementedError

    def units(self) -> List:
        raise UnsupportedError(f"unit group of {self} is not enumerated")

    def normalize(self, a):
        return a

    def sort_key(self, a):
        raise NotImplementedError

    def exact_div(self, a, b):
        """b / a when a divides b, else None."""
        raise NotImplementedError

    def format(self, a) -> str:
        raise NotImplementedError

    # --- integer coordinates (Z-module structure) ---
    def coords(self, a) -> Tuple[int, ...]:
        raise UnsupportedError(f"{self} has no integer coordinates")

    def from_coords(self, c: Sequence[int]):
        raise UnsupportedError(f"{self} has no integer coordinates")

    def ring_basis(self) -> List:
        raise UnsupportedError(f"{self} has no integer coordinates")

    def mult_matrix(self, g) -> List[List[int]]:
        """Rows of the integer matrix of h ↦ g·h on coordinates."""
        cols = [self.coords(self.mul(g, r)) for r in self.ring_basis()]
        return [[col[i] for col in cols] for i in range(self.degree)]

    def __str__(self) -> str:
        return self.kind


@dataclass(frozen=True)
class Integers(DomainDescriptor):
    kind = "Integers"
    degree = 1
    enumerable = True

    @property
    def flags(self) -> DomainFlags:
        return DomainFlags.all_true()

    def coerce(self, value):
        if isinstance(value, bool) or not isinstance(value, int):
            try:
                if int(value) == value:
                    return int(value)
            except (TypeError, ValueError):
                pass
            raise DomainMismatchError(f"{value!r} is not an element of Z")
        return int(value)

    def is_unit(self, a) -> bool:
        return a in (1, -1)

    def units(self) -> List[int]:
        return [1, -1]

    def normalize(self, a):
        return abs(a)

    def sort_key(self, a):
        return (abs(a), a < 0)

    def exact_div(self, a, b):
        if a == 0:
            raise InvalidDivisorError("division by zero")
        q, r = divmod(b, a)
        return q if r == 0 else None

    def format(self, a) -> str:
        return str(a)

    def coords(self, a):
        return (a,)

    def from_coords(self, c):
        return int(c[0])

    def ring_basis(self):
        return [1]

    def __str__(self) -> str:
        return "Z"


@dataclass(frozen=True)
class ImagQuadOrder(DomainDescriptor):
    m: int

    kind = "ImagQuadOrder"
    degree = 2
    enumerable = True

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise InvalidArgumentError(f"m must be an integer >= 2, got {self.m}")
        if any(e > 1 for e in factorint(self.m).values()):
            raise InvalidArgumentError(f"{self.m} is not squarefree")

    @property
    def flags(self) -> DomainFlags:
        # Z[√-2] is Euclidean; every other Z[√-m] has 2 as a nonprime atom.
        if self.m == 2:
            return DomainFlags.all_true()
        return NOETHERIAN_NON_UFD

    @property
    def w(self) -> QuadInt:
        return QuadInt(0, 1, self.m)

    def element(self, u: int, v: int = 0) -> QuadInt:
        return QuadInt(int(u), int(v), self.m)

    def coerce(self, value):
        if isinstance(value, QuadInt):
            if value.m != self.m:
                raise DomainMismatchError(f"{value} belongs to Z[w,-{value.m}], not {self}")
            return value
        if isinstance(value, numbers.Integral) and not isinstance(value, bool):
            return QuadInt(int(value), 0, self.m)
        raise DomainMismatchError(f"{value!r} is not an element of {self}")

    def is_unit(self, a) -> bool:
        return a.norm() == 1

    def units(self) -> List[QuadInt]:
        return [self.one, -self.one]

    def normalize(self, a):
        if a.u > 0 or (a.u == 0 and a.v >= 0):
            return a
        return -a

    def sort_key(self, a):
        return (a.norm(), a.u, a.v)

    def exact_div(self, a, b):
        n = a.norm()
        if n == 0:
            raise InvalidDivisorError("division by zero")
        t = b * a.conjugate()
        if t.u % n or t.v % n:
            return None
        return QuadInt(t.u // n, t.v // n, self.m)

    def format(self, a) -> str:
        u, v = a.u, a.v
        if v == 0:
            return str(u)
        vpart = "w" if abs(v) == 1 else f"{abs(v)}w"
        if u == 0:
            return f"-{vpart}" if v < 0 else vpart
        return f"{u}{'-' if v < 0 else '+'}{vpart}"

    def coords(self, a):
        return (a.u, a.v)

    def from_coords(self, c):
        return QuadInt(int(c[0]), int(c[1]), self.m)

    def ring_basis(self):
        return [self.one, self.w]

    def mult_matrix(self, g) -> List[List[int]]:
        return [[g.u, -self.m * g.v], [g.v, g.u]]

    def __str__(self) -> str:
        return f"Z[w,-{self.m}]"


@dataclass(frozen=True)
class PolyOverRationals(DomainDescriptor):
    kind = "PolyOverRationals"
    degree = 1
    enumerable = False

    @property
    def flags(self) -> DomainFlags:
        return DomainFlags.all_true()

    def coerce(self, value):
        if isinstance(value, Poly):
            if value.gens != (X,):
                raise DomainMismatchError(f"{value} is not a polynomial in x")
            return value.set_domain(QQ)
        if isinstance(value, bool):
            raise DomainMismatchError(f"{value!r} is not an element of Q[x]")
        try:
            return Poly(value, X, domain=QQ)
        except Exception as e:
            raise DomainMismatchError(f"{value!r} is not an element of Q[x]: {e}")

    def is_zero(self, a) -> bool:
        return a.is_zero

    def is_unit(self, a) -> bool:
        return not a.is_zero and a.degree() == 0

    def normalize(self, a):
        return a if a.is_zero else a.monic()

    def sort_key(self, a):
        return (-1 if a.is_zero else a.degree(), tuple(QQ.to_sympy(c) for c in a.all_coeffs()))

    def exact_div(self, a, b):
        if a.is_zero:
            raise InvalidDivisorError("division by zero")
        q, r = b.div(a)
        return q if r.is_zero else None

    def gcd(self, a, b):
        return a.gcd(b)

    def format(self, a) -> str:
        if a.is_zero:
            return "0"
        coeffs = a.all_coeffs()
        deg = len(coeffs) - 1
        parts: List[str] = []
        for i, c in enumerate(coeffs):
            k = deg - i
            c = QQ.to_sympy(c)
            if c == 0:
                continue
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                power = "x" if k == 1 else f"x^{k}"
                body = power if mag == 1 else f"{mag}*{power}"
            if not parts:
                parts.append(f"-{body}" if c < 0 else body)
            else:
                parts.append(f"{'-' if c < 0 else '+'} {body}")
        return " ".join(parts)

    def __str__(self) -> str:
        return "Q[x]"


@dataclass(frozen=True)
class Localized(DomainDescriptor):
    """A_S with S generated by ``s_generators`` (nonzero nonunits of the base)."""

    base: DomainDescriptor
    s_generators: Tuple[Any, ...] = ()

    kind = "Localized"
    enumerable = False

    def __post_init__(self):
        if not isinstance(self.base, (Integers, ImagQuadOrder)):
            raise UnsupportedError(f"cannot localize {self.base}: saturation needs integer coordinates")
        gens = []
        for g in self.s_generators:
            g = self.base.coerce(g)
            if self.base.is_zero(g) or self.base.is_unit(g):
                raise InvalidArgumentError(f"S-generator {self.base.format(g)} must be a nonzero nonunit")
            gens.append(self.base.normalize(g))
        object.__setattr__(self, "s_generators", tuple(gens))

    @property
    def degree(self) -> int:  # type: ignore[override]
        return self.base.degree

    @property
    def flags(self) -> DomainFlags:
        if (
            isinstance(self.base, ImagQuadOrder)
            and self.base.m in PID_AFTER_INVERTING_TWO
            and any(g.norm() % 2 == 0 for g in self.s_generators)
        ):
            return DomainFlags.all_true()
        return self.base.flags

    @cached_property
    def s(self):
        """Product of the S-generators."""
        return self.base.product(self.s_generators)

    def monomial(self, exps: Sequence[int]):
        result = self.base.one
        for g, e in zip(self.s_generators, exps):
            result = self.base.mul(result, self.base.power(g, e))
        return result

    def make(self, num, exps: Sequence[int]) -> SFraction:
        """Reduced fraction: no generator with positive exponent divides num."""
        exps = [int(e) for e in exps]
        if len(exps) != len(self.s_generators) or any(e < 0 for e in exps):
            raise InvalidArgumentError(f"bad denominator exponents {exps}")
        num = self.base.coerce(num)
        if self.base.is_zero(num):
            return SFraction(num, tuple(0 for _ in exps))
        for i, g in enumerate(self.s_generators):
            while exps[i] > 0:
                q = self.base.exact_div(g, num)
                if q is None:
                    break
                num = q
                exps[i] -= 1
        return SFraction(num, tuple(exps))

    def coerce(self, value):
        if isinstance(value, SFraction):
            if len(value.exps) != len(self.s_generators):
                raise DomainMismatchError(f"{value} does not belong to {self}")
            return self.make(self.base.coerce(value.num), value.exps)
        return SFraction(self.base.coerce(value), tuple(0 for _ in self.s_generators))

    def add(self, a, b):
        e = [max(x, y) for x, y in zip(a.exps, b.exps)]
        na = self.base.mul(a.num, self.monomial([x - y for x, y in zip(e, a.exps)]))
        nb = self.base.mul(b.num, self.monomial([x - y for x, y in zip(e, b.exps)]))
        return self.make(self.base.add(na, nb), e)

    def neg(self, a):
        return SFraction(self.base.neg(a.num), a.exps)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        return self.make(self.base.mul(a.num, b.num), [x + y for x, y in zip(a.exps, b.exps)])

    def is_zero(self, a) -> bool:
        return self.base.is_zero(a.num)

    def eq(self, a, b) -> bool:
        return self.base.eq(
            self.base.mul(a.num, self.monomial(b.exps)),
            self.base.mul(b.num, self.monomial(a.exps)),
        )

    def is_unit(self, a) -> bool:
        from psmodules import ideals

        if self.is_zero(a):
            return False
        return ideals.saturation(ideals.ideal_from_generators(self.base, [a.num]), self.s).is_unit_ideal()

    def normalize(self, a):
        return self.make(self.base.normalize(a.num), a.exps)

    def sort_key(self, a):
        return (self.base.sort_key(a.num), a.exps)

    def exact_div(self, a, b):
        """b / a in A_S, decided by saturating the numerator ideal of a."""
        from psmodules import ideals

        if self.is_zero(a):
            raise InvalidDivisorError("division by zero")
        if self.is_zero(b):
            return self.zero
        principal = ideals.ideal_from_generators(self.base, [a.num])
        saturated, steps = ideals.saturation_steps(principal, self.s)
        if not ideals.membership(b.num, saturated):
            return None
        lifted = self.base.mul(b.num, self.base.power(self.s, steps))
        w = self.base.exact_div(a.num, lifted)
        if w is None:
            raise InternalError(f"saturation promised {self.format(a)} | {self.format(b)}")
        num = self.base.mul(w, self.monomial(a.exps))
        return self.make(num, [e + steps for e in b.exps])

    def format(self, a) -> str:
        text = self.base.format(a.num)
        if not any(a.exps):
            return text
        if any(ch in "+-" for ch in text[1:]):
            text = f"({text})"
        factors = []
        for g, e in zip(self.s_generators, a.exps):
            if e == 0:
                continue
            gtext = self.base.format(g)
            if any(ch in "+-" for ch in gtext[1:]):
                gtext = f"({gtext})"
            factors.append(gtext if e == 1 else f"{gtext}^{e}")
        den = factors[0] if len(factors) == 1 else f"({'*'.join(factors)})"
        return f"{text}/{den}"

    def __str__(self) -> str:
        gens = ", ".join(self.base.format(g) for g in self.s_generators)
        return f"loc({self.base}; [{gens}])"


def quadratic_order(m: int) -> ImagQuadOrder:
    return ImagQuadOrder(m)


# ------------------------------------------------------------
# NORM, DIVISIBILITY
# ------------------------------------------------------------
def norm(e) -> int:
    """u² + m·v² for an element of an imaginary quadratic order."""
    if not isinstance(e, QuadInt):
        raise DomainMismatchError(f"norm is defined on Z[w] elements, got {e!r}")
    return e.norm()


def size(D: DomainDescriptor, a) -> int:
    """Absolute norm used for ordering: |a| in Z, u²+mv² in Z[w]."""
    if isinstance(D, ImagQuadOrder):
        return a.norm()
    if isinstance(D, Integers):
        return abs(a)
    raise UnsupportedError(f"no absolute norm on {D}")


def divides(D: DomainDescriptor, a, b) -> bool:
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(a):
        raise InvalidDivisorError("zero divides nothing")
    return D.exact_div(a, b) is not None


def exact_div(D: DomainDescriptor, a, b):
    """The q with b = a·q, or None."""
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(a):
        raise InvalidDivisorError("division by zero")
    return D.exact_div(a, b)


def associates(D: DomainDescriptor, a, b) -> bool:
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(a) or D.is_zero(b):
        return D.is_zero(a) and D.is_zero(b)
    if isinstance(D, Localized):
        return D.exact_div(a, b) is not None and D.exact_div(b, a) is not None
    return D.eq(D.normalize(a), D.normalize(b))


def gcd(D: DomainDescriptor, a, b):
    """gcd in the Bezout test-beds (Z and Q[x])."""
    a, b = D.coerce(a), D.coerce(b)
    if isinstance(D, Integers):
        return math.gcd(a, b)
    if isinstance(D, PolyOverRationals):
        return D.normalize(D.gcd(a, b))
    raise UnsupportedError(f"gcd is computed only in Z and Q[x], not {D}")


# ------------------------------------------------------------
# ENUMERATION
# ------------------------------------------------------------
@functools.lru_cache(maxsize=4096)
def _elements_of_norm(m: int, n: int) -> Tuple[Tuple[int, int], ...]:
    found = set()
    vmax = math.isqrt(n // m) if n >= 0 else -1
    for v in range(-vmax, vmax + 1):
        r = n - m * v * v
        if r < 0:
            continue
        u = math.isqrt(r)
        if u * u != r:
            continue
        for uu, vv in ((u, v), (-u, -v)):
            if uu > 0 or (uu == 0 and vv > 0):
                found.add((uu, vv))
    return tuple(sorted(found))


def elements_of_norm(D: DomainDescriptor, n: int) -> List:
    """Normalized elements of absolute norm n, ordered by (u, v)."""
    if isinstance(D, Integers):
        return [n] if n > 0 else []
    if isinstance(D, ImagQuadOrder):
        return [QuadInt(u, v, D.m) for u, v in _elements_of_norm(D.m, n)]
    raise UnsupportedError(f"norm enumeration is unsupported over {D}")


@functools.lru_cache(maxsize=8192)
def _quad_divisors(m: int, u: int, v: int) -> Tuple[Tuple[int, int], ...]:
    a = QuadInt(u, v, m)
    D = ImagQuadOrder(m)
    out = []
    for n in divisors(a.norm()):
        for du, dv in _elements_of_norm(m, n):
            if D.exact_div(QuadInt(du, dv, m), a) is not None:
                out.append((du, dv))
    return tuple(out)


def _require_enumerable(D: DomainDescriptor, what: str) -> None:
    if not D.enumerable:
        raise UnsupportedError(f"{what} needs divisor enumeration, unavailable over {D}")


def divisors_up_to_units(D: DomainDescriptor, a) -> List:
    """One normalized representative per associate class of divisors of a,
    in ascending norm, ties broken by (u, v)."""
    _require_enumerable(D, "divisors_up_to_units")
    a = D.coerce(a)
    if D.is_zero(a):
        raise InvalidArgumentError("zero has infinitely many divisors")
    if isinstance(D, Integers):
        return [int(d) for d in divisors(abs(a))]
    return [QuadInt(u, v, D.m) for u, v in _quad_divisors(D.m, a.u, a.v)]


def common_divisors(D: DomainDescriptor, a, b) -> List:
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(b):
        raise InvalidArgumentError("common divisors need nonzero arguments")
    return [d for d in divisors_up_to_units(D, a) if D.exact_div(d, b) is not None]


def is_coprime(D: DomainDescriptor, a, b) -> bool:
    """True iff the only common divisors of a and b are units."""
    return all(D.is_unit(d) for d in common_divisors(D, a, b))


def mcd(D: DomainDescriptor, a, b):
    """A maximal common divisor d: d | a, d | b and a/d, b/d coprime.

    Extracts the smallest nonunit common divisor until none is left; the
    loop terminates in ACCP domains.
    """
    a, b = D.coerce(a), D.coerce(b)
    if D.is_zero(a) or D.is_zero(b):
        raise InvalidArgumentError("mcd needs nonzero arguments")
    if not D.enumerable:
        if D.flags.is_gcd and isinstance(D, PolyOverRationals):
            return gcd(D, a, b)
        raise UnsupportedError(f"mcd needs divisor enumeration over {D}")
    if not D.flags.is_accp:
        raise UnsupportedError(f"mcd extraction may not terminate over {D}")
    d = D.one
    while True:
        nonunits = [t for t in common_divisors(D, a, b) if not D.is_unit(t)]
        if not nonunits:
            break
        t = nonunits[0]
        a, b = D.exact_div(t, a), D.exact_div(t, b)
        d = D.mul(d, t)
    if not is_coprime(D, a, b):
        raise InternalError(f"mcd postcondition failed: {D.format(a)}, {D.format(b)} not coprime")
    return D.normalize(d)


# ------------------------------------------------------------
# RESIDUE RINGS
# ------------------------------------------------------------
class ResidueRing:
    """The finite ring O/I for a full-rank ideal lattice I of Z or Z[w]."""

    def __init__(self, domain: DomainDescriptor, basis: lattice.Basis):
        if not isinstance(domain, (Integers, ImagQuadOrder)):
            raise UnsupportedError(f"no finite residue rings over {domain}")
        if len(basis) != domain.degree:
            raise InvalidArgumentError("residue rings need a nonzero ideal")
        self.domain = domain
        self.basis = basis
        self.moduli = [col[lattice.pivot_row(col)] for col in basis]
        self.size = lattice.determinant(basis, domain.degree)

    @classmethod
    def of_element(cls, domain: DomainDescriptor, a) -> "ResidueRing":
        cols = [domain.coords(domain.mul(a, r)) for r in domain.ring_basis()]
        return cls(domain, lattice.hnf(cols, domain.degree))

    def reduce(self, c: Sequence[int]) -> Tuple[int, ...]:
        r = [int(x) for x in c]
        for j in range(len(self.basis) - 1, -1, -1):
            col = self.basis[j]
            p = lattice.pivot_row(col)
            q = r[p] // col[p]
            if q:
                r = [ri - q * ci for ri, ci in zip(r, col)]
        return tuple(r)

    def elements(self) -> Iterator[Tuple[int, ...]]:
        # pivot of column j sits on row j for a full-rank basis
        return itertools.product(*(range(k) for k in self.moduli))

    def mul(self, r, s) -> Tuple[int, ...]:
        D = self.domain
        return self.reduce(D.coords(D.mul(D.from_coords(r), D.from_coords(s))))

    def is_field(self) -> bool:
        if self.size == 1:
            return False
        factors = factorint(self.size)
        if len(factors) > 1:
            return False
        p, k = next(iter(factors.items()))
        if k == 1:
            return True
        if k > self.domain.degree:
            return False
        # order p²: a field forces p ∈ I, hence I = pO and O/I = F_p[w]/(w²+m)
        D = self.domain
        if not lattice.contains(self.basis, D.coords(D.coerce(p))):
            return False
        return p != 2 and not is_quad_residue((-D.m) % p, p)

    def is_integral_domain_bruteforce(self) -> bool:
        if self.size > RESIDUE_BRUTEFORCE_LIMIT:
            raise UnsupportedError(f"residue ring of size {self.size} is too large to scan")
        return self.size > 1 and self.zero_divisor_pair() is None

    def zero_divisor_pair(self) -> Optional[Tuple[Any, Any]]:
        """Nonzero residues r, s with r·s ≡ 0, as domain elements."""
        if self.size > RESIDUE_BRUTEFORCE_LIMIT:
            raise UnsupportedError(f"residue ring of size {self.size} is too large to scan")
        zero = self.reduce([0] * self.domain.degree)
        nonzero = [r for r in self.elements() if r != zero]
        for i, r in enumerate(nonzero):
            for s in nonzero[i:]:
                if self.mul(r, s) == zero:
                    D = self.domain
                    return D.from_coords(r), D.from_coords(s)
        return None


# ------------------------------------------------------------
# ATOMS & PRIMES
# ------------------------------------------------------------
def _require_nonzero_nonunit(D: DomainDescriptor, a, what: str):
    a = D.coerce(a)
    if D.is_zero(a) or D.is_unit(a):
        raise InvalidArgumentError(f"{what} needs a nonzero nonunit, got {D.format(a)}")
    return a


def is_atom(D: DomainDescriptor, a) -> bool:
    a = _require_nonzero_nonunit(D, a, "is_atom")
    return len(divisors_up_to_units(D, a)) == 2


def is_prime_element(D: DomainDescriptor, a) -> bool:
    """Prime test through the finite residue ring O/(a)."""
    a = _require_nonzero_nonunit(D, a, "is_prime_element")
    if isinstance(D, Integers):
        return isprime(abs(a))
    if isinstance(D, ImagQuadOrder):
        return ResidueRing.of_element(D, a).is_field()
    if isinstance(D, Localized):
        from psmodules import ideals

        saturated = ideals.saturation(ideals.ideal_from_generators(D.base, [a.num]), D.s)
        return ideals.is_prime_ideal(saturated)
    raise UnsupportedError(f"primality over {D} needs polynomial factorization")


def factor_into_atoms(D: DomainDescriptor, a) -> List:
    """Atoms whose product is an associate of a, in ascending norm."""
    a = _require_nonzero_nonunit(D, a, "factor_into_atoms")
    _require_enumerable(D, "factor_into_atoms")
    if isinstance(D, Integers):
        return [p for p, k in sorted(factorint(abs(a)).items()) for _ in range(k)]
    atoms = []
    while not D.is_unit(a):
        # the smallest nonunit divisor has no proper divisors left, so it is an atom
        t = divisors_up_to_units(D, a)[1]
        atoms.append(t)
        a = D.exact_div(t, a)
    return sorted(atoms, key=D.sort_key)


def zero_divisor_witness(D: DomainDescriptor, c) -> Optional[Tuple[Any, Any]]:
    """a, b outside cA with c | a·b, or None when c is prime."""
    c = _require_nonzero_nonunit(D, c, "zero_divisor_witness")
    if isinstance(D, Integers):
        if isprime(abs(c)):
            return None
        p = min(factorint(abs(c)))
        return p, abs(c) // p
    if not isinstance(D, ImagQuadOrder):
        raise UnsupportedError(f"no residue rings over {D}")
    return ResidueRing.of_element(D, c).zero_divisor_pair()
