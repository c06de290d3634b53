import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st_hyp

from psmodules.arith import Integers
from psmodules.errors import DomainMismatchError, InvalidArgumentError, InvalidDivisorError, UnsupportedError
from psmodules.ideals import ideal_from_generators
from psmodules.modules import (
    FractionalModule,
    LocModuleView,
    colon_ideal,
    direct_sum,
    divide_in_module,
    free_module,
    is_irreducible_element,
    is_primitive,
    is_pure_submodule,
    is_rd_submodule,
    module_from_generators,
    module_membership,
    module_saturation,
    scalar_divisors,
)

primitive_pairs = st_hyp.tuples(
    st_hyp.integers(min_value=-30, max_value=30),
    st_hyp.integers(min_value=-30, max_value=30),
).filter(lambda p: math.gcd(*p) == 1)


def test_membership_and_division(ints):
    M = module_from_generators(ints, 2, [(2, 0), (0, 3)])
    assert module_membership((2, 3), M)
    assert not module_membership((1, 0), M)
    assert divide_in_module((4, 6), 2, free_module(ints, 2)) == (2, 3)
    assert divide_in_module((2, 6), 2, M) is None
    with pytest.raises(InvalidDivisorError):
        M.divide((2, 3), 0)
    with pytest.raises(DomainMismatchError):
        module_membership((1, 2, 3), M)


def test_colon_ideal_over_integers(ints):
    assert colon_ideal(6, (4,), free_module(ints, 1)) == ideal_from_generators(ints, [3])
    with pytest.raises(InvalidArgumentError):
        colon_ideal(6, (0,), free_module(ints, 1))


def test_colon_ideal_needs_a_vector_of_the_module(ints):
    M = module_from_generators(ints, 1, [(2,)])
    assert colon_ideal(3, (4,), M) == ideal_from_generators(ints, [3])
    with pytest.raises(InvalidArgumentError):
        colon_ideal(3, (5,), M)


def test_colon_ideal_after_inverting_two(sqrt5, line_sqrt5_inv2):
    w = sqrt5.w
    assert colon_ideal(1 + w, (1,), line_sqrt5_inv2) == ideal_from_generators(sqrt5, [3, 1 + w])


def test_scalar_divisors(ints):
    assert scalar_divisors((6,), free_module(ints, 1)) == [2, 3, 6]
    assert scalar_divisors((6,), module_from_generators(ints, 1, [(2,)])) == [3]
    assert is_irreducible_element((1, 2), free_module(ints, 2))
    assert not is_irreducible_element((2, 4), free_module(ints, 2))


def test_primitivity(ints, sqrt5):
    w = sqrt5.w
    assert is_primitive((1, 2), free_module(ints, 2))
    assert not is_primitive((2, 4), free_module(ints, 2))
    # every element of a non-principal ideal spans a proper sublattice of its line
    P = module_from_generators(sqrt5, 1, [(2,), (1 + w,)])
    assert not is_primitive((2,), P)
    assert is_irreducible_element((2,), P)


def test_pure_and_rd_submodules(ints):
    Z2 = free_module(ints, 2)
    diagonal = module_from_generators(ints, 2, [(1, 1)])
    doubled = module_from_generators(ints, 2, [(2, 2)])
    assert is_pure_submodule(diagonal, Z2)
    assert not is_pure_submodule(doubled, Z2)
    assert is_rd_submodule(diagonal, Z2, [2, 3, 6])
    assert not is_rd_submodule(doubled, Z2, [2])


@settings(deadline=None)
@given(primitive_pairs, st_hyp.integers(min_value=2, max_value=12))
def test_pure_lines_are_relatively_divisible(v, a):
    D = Integers()
    N = module_from_generators(D, 2, [v])
    assert is_pure_submodule(N, free_module(D, 2))
    assert is_rd_submodule(N, free_module(D, 2), [a])


def test_module_saturation(ints):
    assert module_saturation(module_from_generators(ints, 1, [(12,)]), 2) == module_from_generators(ints, 1, [(3,)])
    with pytest.raises(InvalidArgumentError):
        module_saturation(free_module(ints, 1), 0)


def test_localized_view(sqrt3):
    view = LocModuleView(free_module(sqrt3, 1), (2,))
    half = view.divide(view.coerce((1,)), 2)
    assert half is not None
    assert half.exps == (1,)
    assert view.contains(half)
    assert view.equal(view.scale(2, half), (1,))
    assert view.divide((1,), 3) is None
    assert view.make((4,), (2,)) == view.coerce((1,))
    assert not is_primitive((1,), view)


def test_direct_sums(ints, sqrt3):
    M = direct_sum(free_module(ints, 1), module_from_generators(ints, 2, [(2, 0), (0, 2)]))
    assert M.rank == 3
    assert module_membership((1, 2, 2), M)
    assert not module_membership((1, 1, 0), M)
    view = LocModuleView(free_module(sqrt3, 1), (2,))
    assert direct_sum(view, view).rank == 2
    with pytest.raises(DomainMismatchError):
        direct_sum(view, free_module(sqrt3, 1))
    with pytest.raises(DomainMismatchError):
        direct_sum(view, LocModuleView(free_module(sqrt3, 1), (3,)))


def test_fractional_modules(ints):
    F = FractionalModule.of(free_module(ints, 1))
    assert not F.contains((1,), 3)
    G = F.adjoin((1,), 3)
    assert G.contains((1,), 3)
    assert G.denominator == 3
    assert G.includes(F)
    assert not F.includes(G)
    reduced = FractionalModule.canonical(2, module_from_generators(ints, 1, [(4,)]))
    assert reduced.denominator == 1
    assert reduced.numerator.basis == ((2,),)


def test_modules_need_a_lattice_domain(qx, ints):
    with pytest.raises(UnsupportedError):
        module_from_generators(qx, 1, [(1,)])
    with pytest.raises(InvalidArgumentError):
        module_from_generators(ints, 0, [])
    with pytest.raises(DomainMismatchError):
        free_module(ints, 2).coerce((1,))
