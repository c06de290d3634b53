import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_hyp
from sympy import Poly, Symbol

from psmodules.arith import (
    DomainFlags,
    ImagQuadOrder,
    Integers,
    Localized,
    PolyOverRationals,
    QuadInt,
    ResidueRing,
    associates,
    divides,
    divisors_up_to_units,
    exact_div,
    factor_into_atoms,
    gcd,
    is_atom,
    is_coprime,
    is_prime_element,
    mcd,
    norm,
    zero_divisor_witness,
)
from psmodules.errors import (
    DomainMismatchError,
    InternalError,
    InvalidArgumentError,
    InvalidDivisorError,
    UnsupportedError,
)

small = st_hyp.integers(min_value=-6, max_value=6)


def quad(m):
    return st_hyp.builds(lambda u, v: QuadInt(u, v, m), small, small).filter(bool)


def test_norm_of_known_elements(sqrt5):
    w = sqrt5.w
    assert norm(1 + w) == 6
    assert norm(2 * w) == 20
    assert norm(sqrt5.zero) == 0
    with pytest.raises(DomainMismatchError):
        norm(7)


@settings(deadline=None)
@given(quad(5), quad(5))
def test_norm_is_multiplicative(a, b):
    assert (a * b).norm() == a.norm() * b.norm()


def test_mixing_orders_is_rejected(sqrt3, sqrt5):
    with pytest.raises(DomainMismatchError):
        sqrt3.w + sqrt5.w


def test_exact_division(sqrt5):
    w = sqrt5.w
    assert exact_div(sqrt5, 1 + w, 6) == 1 - w
    assert exact_div(sqrt5, 1 + w, 2) is None
    assert divides(sqrt5, 3, 0)
    with pytest.raises(InvalidDivisorError):
        divides(sqrt5, 0, 3)


@settings(deadline=None)
@given(quad(5), quad(5))
def test_exact_division_inverts_products(a, q):
    D = ImagQuadOrder(5)
    assert D.exact_div(a, a * q) == q


def test_normalization_picks_one_associate(sqrt5):
    w = sqrt5.w
    assert sqrt5.normalize(-1 - w) == 1 + w
    assert sqrt5.normalize(-w) == w
    assert associates(sqrt5, 1 + w, -1 - w)
    assert not associates(sqrt5, 1 + w, 1 - w)


def test_format_examples(sqrt5):
    w = sqrt5.w
    assert sqrt5.format(1 + w) == "1+w"
    assert sqrt5.format(2 * w) == "2w"
    assert sqrt5.format(-w) == "-w"


def test_constructor_rejects_bad_m():
    with pytest.raises(InvalidArgumentError):
        ImagQuadOrder(4)
    with pytest.raises(InvalidArgumentError):
        ImagQuadOrder(1)


def test_flags_are_consistent(sqrt2, sqrt5):
    assert sqrt2.flags.is_ufd
    assert not sqrt5.flags.is_ufd
    assert sqrt5.flags.is_accp and sqrt5.flags.is_atomic
    with pytest.raises(InternalError):
        DomainFlags(is_pid=True)


def test_divisor_enumeration(ints, sqrt5):
    w = sqrt5.w
    assert divisors_up_to_units(ints, -6) == [1, 2, 3, 6]
    assert divisors_up_to_units(sqrt5, 2) == [sqrt5.one, sqrt5.coerce(2)]
    assert set(divisors_up_to_units(sqrt5, 6)) == {sqrt5.coerce(c) for c in (1, 2, 3, 6)} | {1 + w, 1 - w}
    with pytest.raises(InvalidArgumentError):
        divisors_up_to_units(ints, 0)


def test_divisors_need_enumeration(qx):
    with pytest.raises(UnsupportedError):
        divisors_up_to_units(qx, qx.coerce(Poly(Symbol("x") ** 2 - 1)))


@settings(deadline=None)
@given(quad(5), quad(5))
def test_divisor_list_is_complete(a, q):
    D = ImagQuadOrder(5)
    divs = divisors_up_to_units(D, a * q)
    assert any(associates(D, a, d) for d in divs)
    assert any(associates(D, q, d) for d in divs)
    norms = [d.norm() for d in divs]
    assert norms == sorted(norms)


def test_coprime_and_mcd(ints, sqrt5):
    w = sqrt5.w
    assert is_coprime(sqrt5, 3, 1 + w)
    assert is_coprime(sqrt5, 2, 1 + w)
    assert not is_coprime(sqrt5, 2, 2 + 2 * w)
    assert mcd(ints, 12, 18) == 6
    assert mcd(sqrt5, 6, 2 + 2 * w) == sqrt5.coerce(2)


@settings(deadline=None)
@given(quad(5), quad(5))
def test_mcd_leaves_coprime_cofactors(a, b):
    D = ImagQuadOrder(5)
    d = mcd(D, a, b)
    assert is_coprime(D, D.exact_div(d, a), D.exact_div(d, b))


def test_atoms_and_primes(ints, sqrt3, sqrt5):
    w3, w5 = sqrt3.w, sqrt5.w
    assert is_atom(sqrt3, 2)
    assert not is_prime_element(sqrt3, 2)
    assert is_prime_element(sqrt5, w5)
    assert not is_prime_element(sqrt5, 3)
    assert not is_prime_element(sqrt5, 1 + w5)
    assert is_atom(sqrt5, 1 + w5)
    assert is_atom(sqrt3, 1 + w3)
    assert is_prime_element(ints, -7)
    with pytest.raises(InvalidArgumentError):
        is_atom(sqrt5, 1)


@settings(deadline=None, max_examples=60)
@given(st_hyp.sampled_from([3, 5]).flatmap(lambda m: quad(m).filter(lambda e: e.norm() > 1)))
def test_primes_are_atoms(a):
    D = ImagQuadOrder(a.m)
    assert not is_prime_element(D, a) or is_atom(D, a)


def test_factor_into_atoms(ints, sqrt5):
    w = sqrt5.w
    assert factor_into_atoms(ints, 12) == [2, 2, 3]
    atoms = factor_into_atoms(sqrt5, 6)
    assert all(is_atom(sqrt5, t) for t in atoms)
    assert associates(sqrt5, sqrt5.product(atoms), 6)
    assert len(atoms) == 2
    assert factor_into_atoms(sqrt5, w) == [w]


@settings(deadline=None, max_examples=40)
@given(quad(3).filter(lambda e: e.norm() > 1))
def test_residue_ring_test_agrees_with_scan(a):
    D = ImagQuadOrder(3)
    ring = ResidueRing.of_element(D, a)
    assert ring.size == a.norm()
    assert ring.is_field() == ring.is_integral_domain_bruteforce()


def test_zero_divisor_witness(ints, sqrt3):
    assert zero_divisor_witness(ints, 7) is None
    assert zero_divisor_witness(ints, 12) == (2, 6)
    pair = zero_divisor_witness(sqrt3, 2)
    assert pair is not None
    r, s = pair
    assert divides(sqrt3, 2, sqrt3.mul(r, s))
    assert not divides(sqrt3, 2, r) and not divides(sqrt3, 2, s)


def test_gcd_in_bezout_domains(ints, qx, sqrt5):
    x = Symbol("x")
    assert gcd(ints, 12, -18) == 6
    assert gcd(qx, Poly(x**2 - 1, x), Poly(2 * x - 2, x)) == qx.coerce(Poly(x - 1, x))
    with pytest.raises(UnsupportedError):
        gcd(sqrt5, 2, 4)


def test_localized_arithmetic(sqrt3_inv2):
    L = sqrt3_inv2
    A = L.base
    w = A.w
    assert L.is_unit(L.coerce(2))
    assert L.is_unit(L.coerce(1 + w))
    assert not L.is_unit(L.coerce(3))
    half = L.exact_div(L.coerce(2), L.one)
    assert L.eq(L.mul(half, L.coerce(2)), L.one)
    assert L.make(4, (2,)) == L.coerce(1)
    assert L.make(1 + w, (3,)).exps == (3,)
    assert L.exact_div(L.coerce(3), L.coerce(1 + w)) is None


def test_localized_flags(sqrt3, sqrt5):
    assert Localized(sqrt5, (2,)).flags.is_ufd
    assert not Localized(sqrt5, (3,)).flags.is_ufd
    assert Localized(Integers(), (2,)).flags.is_pid
    with pytest.raises(InvalidArgumentError):
        Localized(sqrt3, (1,))
    with pytest.raises(UnsupportedError):
        Localized(PolyOverRationals(), ())
