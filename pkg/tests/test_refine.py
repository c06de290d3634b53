import math

import numpy as np
import pytest

from psmodules.arith import ImagQuadOrder, Integers, Localized, associates
from psmodules.constructions import nonprime_atom_set
from psmodules.errors import (
    DomainMismatchError,
    InvalidArgumentError,
    NotPrimalError,
    UnsupportedError,
)
from psmodules.ideals import ideal_from_generators, unit_ideal
from psmodules.modules import LocModuleView, direct_sum, free_module, module_from_generators
from psmodules.refine import (
    FOUND,
    NOT_REFINABLE,
    Instance,
    Refinement,
    brute_force_refinable,
    colon_principal_check,
    coprime_ideal_witness,
    direct_sum_refinement,
    find_refinement,
    lcm_via_product_refinement,
    localize_instance,
    mcd_refinement,
    nagata_lift,
    nonprime_atom_witness,
    oracle_certificate,
    reduce_instance,
    ufd_fast_path,
    verify_refinement,
)
from psmodules.sampling import random_instance, random_module


def _free_instance(D, a, b, x, y):
    return Instance(D, free_module(D, len(x)), a, b, x, y)


def _agrees_with_oracle(inst):
    cert = find_refinement(inst)
    if cert.found:
        assert verify_refinement(inst, cert.refinement)
    return cert.found == (brute_force_refinable(inst) is not None)


# ---------------------------------------------------------------- instances
def test_instance_rejects_unequal_sides(ints):
    with pytest.raises(InvalidArgumentError):
        _free_instance(ints, 2, 3, (1,), (1,))
    with pytest.raises(InvalidArgumentError):
        _free_instance(ints, 0, 3, (3,), (0,))


def test_instance_rejects_vectors_outside_module(ints):
    with pytest.raises(InvalidArgumentError):
        Instance(ints, module_from_generators(ints, 1, [(2,)]), 2, 1, (1,), (2,))


def test_localized_module_needs_local_scalars(sqrt3):
    view = LocModuleView(free_module(sqrt3, 1), (2,))
    with pytest.raises(DomainMismatchError):
        Instance(sqrt3, view, 2, 2, (1,), (1,))


# ---------------------------------------------------------------- criterion
def test_non_ps_witness_in_sqrt5(sqrt5):
    w = sqrt5.w
    inst = _free_instance(sqrt5, 2, 1 + w, (3,), (1 - w,))
    cert = find_refinement(inst)
    assert cert.outcome == NOT_REFINABLE
    assert [r.candidate for r in cert.candidates] == [sqrt5.one]
    assert brute_force_refinable(inst) is None
    assert cert.to_dict()["candidates"] == [{"element": "1", "passed": False, "reason": "t*x not in b*M"}]


def test_found_over_integers(ints):
    inst = _free_instance(ints, 6, 4, (2, 4), (3, 6))
    cert = find_refinement(inst)
    assert cert.outcome == FOUND
    assert verify_refinement(inst, cert.refinement)
    assert cert.refinement.c == 2
    doc = cert.to_dict()
    assert doc["refinement"] == {"c": "2", "d": "2", "e": "3", "z": "(1,2)"}


def test_verify_rejects_wrong_tables(ints):
    inst = _free_instance(ints, 6, 4, (2, 4), (3, 6))
    assert not verify_refinement(inst, Refinement(1, 4, 6, (1, 2)))
    assert not verify_refinement(inst, Refinement(2, 2, 3, (1, 2, 3)))


def test_cross_reduction_lifts_back(ints):
    inst = _free_instance(ints, 6, 4, (2, 4), (3, 6))
    reduced, steps = reduce_instance(inst, cross=True)
    assert [s.kind for s in steps] == ["ab", "ay", "bx"]
    assert (reduced.a, reduced.b) == (1, 1)
    cert = find_refinement(inst, reduce=True, cross=True)
    assert cert.found
    assert cert.refinement == Refinement(2, 2, 3, (1, 2))


def test_reduction_keeps_refutations(sqrt5):
    w = sqrt5.w
    inst = _free_instance(sqrt5, 2 * (1 + w), (1 + w) * (1 + w), (3,), (1 - w,))
    cert = find_refinement(inst, reduce=True)
    assert cert.outcome == NOT_REFINABLE
    assert cert.instance == inst
    assert cert.reductions


def test_localization_makes_sqrt3_instance_refine(sqrt3, sqrt3_inv2):
    w = sqrt3.w
    base = _free_instance(sqrt3, 2, 1 + w, (2,), (1 - w,))
    assert find_refinement(base).outcome == NOT_REFINABLE
    local = localize_instance(base, [2])
    assert local.domain == sqrt3_inv2
    cert = find_refinement(local)
    assert cert.found
    assert verify_refinement(local, cert.refinement)


# ---------------------------------------------------------------- ufd & mcd
def test_ufd_fast_path(ints, sqrt5):
    cert = ufd_fast_path(_free_instance(ints, 6, 4, (2, 4), (3, 6)))
    assert cert.found and cert.method == "ufd"
    w = sqrt5.w
    with pytest.raises(UnsupportedError):
        ufd_fast_path(_free_instance(sqrt5, 2, 1 + w, (3,), (1 - w,)))


def test_atom_that_splits_after_localizing_still_refines(sqrt5):
    L = Localized(sqrt5, (2,))
    view = LocModuleView(free_module(sqrt5, 1), (2,))
    inst = Instance(L, view, L.coerce(3), L.coerce(1), (1,), (3,))
    cert = find_refinement(inst)
    assert cert.found
    assert L.is_unit(cert.refinement.c)
    assert ufd_fast_path(inst).found


def test_primes_of_a_localization_come_from_divisors_times_s(sqrt5):
    w = sqrt5.w
    S = (2, 3, 1 + w, 1 - w)
    L = Localized(sqrt5, S)
    view = LocModuleView(free_module(sqrt5, 1), S)
    inst = Instance(L, view, L.coerce(7), L.coerce(7), (1,), (1,))
    cert = find_refinement(inst)
    assert cert.found
    assert associates(L, cert.refinement.c, L.coerce(7))


def test_localization_without_factorization_scans_numerator_divisors():
    D = ImagQuadOrder(14)
    L = Localized(D, (3,))
    assert not L.flags.is_ufd
    view = LocModuleView(free_module(D, 1), (3,))
    inst = Instance(L, view, L.coerce(5), L.coerce(1), (1,), (5,))
    cert = find_refinement(inst)
    assert cert.found
    assert verify_refinement(inst, cert.refinement)


def test_coprime_scalars_refine_through_a_unit(ints, sqrt5):
    rng = np.random.default_rng(11)
    M = free_module(ints, 2)
    checked = 0
    while checked < 30:
        a, b = (int(v) for v in rng.integers(1, 40, size=2))
        v = tuple(int(e) for e in rng.integers(-9, 10, size=2))
        if math.gcd(a, b) != 1 or not any(v):
            continue
        cert = find_refinement(Instance(ints, M, a, b, M.scale(b, v), M.scale(a, v)))
        assert cert.found and ints.is_unit(cert.refinement.c)
        checked += 1
    w = sqrt5.w
    cert = find_refinement(_free_instance(sqrt5, 3, 1 + w, (1 + w,), (3,)))
    assert cert.found and sqrt5.is_unit(cert.refinement.c)


def test_mcd_route(ints, sqrt5):
    w = sqrt5.w
    cert = mcd_refinement(_free_instance(sqrt5, 6, 2 + 2 * w, (1 + w,), (3,)))
    assert cert.found
    assert cert.refinement.c == sqrt5.coerce(2)
    assert mcd_refinement(_free_instance(ints, 6, 4, (2, 4), (3, 6))).found


def test_oracle_certificate(ints, sqrt5):
    w = sqrt5.w
    assert oracle_certificate(_free_instance(ints, 2, 4, (4,), (2,))).found
    assert oracle_certificate(_free_instance(sqrt5, 3, 1 + w, (2,), (1 - w,))).outcome == NOT_REFINABLE
    L = Localized(ints, (2,))
    view = LocModuleView(free_module(ints, 1), (2,))
    with pytest.raises(UnsupportedError):
        brute_force_refinable(Instance(L, view, L.coerce(2), L.coerce(2), (1,), (1,)))


# ---------------------------------------------------------------- sampled decisions
def test_nonprime_atoms_inverted_every_instance_refines(sqrt3):
    S = nonprime_atom_set(sqrt3, 4)
    M = LocModuleView(free_module(sqrt3, 1), S.generators)
    rng = np.random.default_rng(15)
    for _ in range(100):
        inst = random_instance(M, rng, norm_bound=200)
        cert = find_refinement(inst)
        assert cert.outcome == FOUND, inst.to_dict()
        assert verify_refinement(inst, cert.refinement)


def test_integer_submodules_always_refine(ints):
    rng = np.random.default_rng(44)
    for i in range(200):
        M = random_module(ints, 3, rng)
        inst = random_instance(M, rng, norm_bound=60)
        cert = find_refinement(inst)
        assert cert.found, inst.to_dict()
        assert verify_refinement(inst, cert.refinement)
        if i % 4 == 0:
            assert brute_force_refinable(inst) is not None


@pytest.mark.parametrize("domain_name", ["ints", "sqrt5"])
def test_criterion_matches_oracle(domain_name, request):
    D = request.getfixturevalue(domain_name)
    rng = np.random.default_rng(7)
    for _ in range(100):
        M = random_module(D, int(rng.integers(1, 4)), rng)
        inst = random_instance(M, rng, norm_bound=400)
        assert _agrees_with_oracle(inst), inst.to_dict()


# ---------------------------------------------------------------- direct sums
def test_direct_sum_matches_criterion_after_localizing(sqrt3):
    rng = np.random.default_rng(6)
    for _ in range(100):
        first = LocModuleView(random_module(sqrt3, 1, rng), (2,))
        second = LocModuleView(random_module(sqrt3, 2, rng), (2,))
        M = direct_sum(first, second)
        inst = random_instance(M, rng, norm_bound=50)
        staged = direct_sum_refinement(inst, first, second)
        assert staged.outcome == find_refinement(inst).outcome == FOUND


def test_direct_sum_matches_criterion_in_sqrt5(sqrt5):
    rng = np.random.default_rng(9)
    for _ in range(60):
        first, second = random_module(sqrt5, 1, rng), random_module(sqrt5, 1, rng)
        inst = random_instance(direct_sum(first, second), rng, norm_bound=30)
        staged = direct_sum_refinement(inst, first, second)
        assert staged.outcome == find_refinement(inst).outcome
        if staged.found:
            assert verify_refinement(inst, staged.refinement)


def test_direct_sum_rank_mismatch(ints):
    inst = _free_instance(ints, 2, 2, (1, 1), (1, 1))
    with pytest.raises(DomainMismatchError):
        direct_sum_refinement(inst, free_module(ints, 1), free_module(ints, 2))


# ---------------------------------------------------------------- lifting
def test_lift_over_integers_pinned(ints):
    inst = _free_instance(ints, 4, 2, (1,), (2,))
    local = localize_instance(inst, [2])
    cert = find_refinement(local)
    assert cert.found
    lifted = nagata_lift(cert.refinement, inst, [2])
    assert lifted == Refinement(2, 1, 2, (1,))


def test_lift_over_integers_never_needs_a_fallback(ints):
    rng = np.random.default_rng(8)
    for _ in range(50):
        inst = random_instance(random_module(ints, 2, rng), rng, norm_bound=40)
        local = localize_instance(inst, [2, 3])
        lifted = nagata_lift(find_refinement(local).refinement, inst, [2, 3])
        assert verify_refinement(inst, lifted)


@pytest.mark.parametrize(
    "gens, a, b, x, y",
    [
        ([(4, -4), (-2, 0), (2, 3)], 10, -4, (52, 0), (-130, 0)),
        ([(6, 4), (1, 0), (-2, 4)], 32, -32, (-54, 108), (54, -108)),
    ],
)
def test_lift_when_the_denominator_does_not_divide_z(ints, gens, a, b, x, y):
    inst = Instance(ints, module_from_generators(ints, 2, gens), a, b, x, y)
    local = localize_instance(inst, [2, 3])
    lifted = nagata_lift(find_refinement(local).refinement, inst, [2, 3])
    assert verify_refinement(inst, lifted)


def test_lift_over_sqrt3_succeeds_or_reports_the_split(sqrt3):
    S = [2, 1 + sqrt3.w, 1 - sqrt3.w]
    rng = np.random.default_rng(50)
    lifted = failed = 0
    for _ in range(50):
        inst = random_instance(free_module(sqrt3, 1), rng, norm_bound=60)
        cert = find_refinement(localize_instance(inst, S))
        assert cert.found
        try:
            r = nagata_lift(cert.refinement, inst, S)
        except NotPrimalError as e:
            assert e.pair
            failed += 1
            continue
        assert verify_refinement(inst, r)
        lifted += 1
    assert lifted + failed == 50
    assert lifted > 0


def test_lift_rejects_foreign_refinements(ints):
    inst = _free_instance(ints, 4, 2, (1,), (2,))
    with pytest.raises(InvalidArgumentError):
        nagata_lift(Refinement(1, 1, 1, (1,)), inst, [])


# ---------------------------------------------------------------- lcm
def test_lcm_from_product_refinement():
    assert lcm_via_product_refinement(4, 6, [12, 24, 36]) == 12
    assert lcm_via_product_refinement(1, 6, [6, 12]) == 6
    assert lcm_via_product_refinement(5, 5, [5, 25]) == 5


def test_lcm_depends_on_the_listed_multiples():
    assert lcm_via_product_refinement(4, 6, [24, 48]) == 24
    assert lcm_via_product_refinement(4, 6, [24, 36]) == 12


def test_lcm_on_random_pairs():
    rng = np.random.default_rng(10)
    for _ in range(100):
        a, b = (int(v) for v in rng.integers(1, 50, size=2))
        lcm = math.lcm(a, b)
        multiples = [lcm * int(k) for k in rng.integers(1, 6, size=int(rng.integers(1, 5)))]
        result = lcm_via_product_refinement(a, b, multiples)
        assert result == math.gcd(a * b, math.gcd(*multiples))
        assert all(f % result == 0 for f in multiples)
        assert lcm_via_product_refinement(a, b, multiples + [lcm]) == lcm


def test_lcm_argument_checks(sqrt5):
    with pytest.raises(InvalidArgumentError):
        lcm_via_product_refinement(4, 6, [18])
    with pytest.raises(InvalidArgumentError):
        lcm_via_product_refinement(4, 6, [])
    with pytest.raises(UnsupportedError):
        lcm_via_product_refinement(2, 3, [6], domain=sqrt5)


# ---------------------------------------------------------------- witnesses
def test_coprime_pair_in_proper_ideal(sqrt5):
    w = sqrt5.w
    cert = coprime_ideal_witness(ideal_from_generators(sqrt5, [3, 1 + w]))
    assert cert is not None
    assert cert.outcome == NOT_REFINABLE
    with pytest.raises(InvalidArgumentError):
        coprime_ideal_witness(unit_ideal(sqrt5))


def test_nonprime_atom_witness(sqrt3, ints):
    cert = nonprime_atom_witness(free_module(sqrt3, 1), 2)
    assert cert.outcome == NOT_REFINABLE
    with pytest.raises(InvalidArgumentError):
        nonprime_atom_witness(free_module(ints, 1), 3)


def test_colon_principal_check(sqrt5, line_sqrt5_inv2):
    w = sqrt5.w
    check = colon_principal_check(1 + w, (1,), line_sqrt5_inv2)
    assert not check.principal
    assert check.ideal == ideal_from_generators(sqrt5, [3, 1 + w])
    integral = colon_principal_check(6, (4,), free_module(Integers(), 1))
    assert integral.principal and associates(Integers(), integral.generator, 3)
