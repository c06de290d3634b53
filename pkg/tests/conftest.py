import numpy as np
import pytest

from psmodules.arith import ImagQuadOrder, Integers, Localized, PolyOverRationals
from psmodules.modules import LocModuleView, free_module


@pytest.fixture
def ints():
    return Integers()


@pytest.fixture
def sqrt2():
    return ImagQuadOrder(2)


@pytest.fixture
def sqrt3():
    return ImagQuadOrder(3)


@pytest.fixture
def sqrt5():
    return ImagQuadOrder(5)


@pytest.fixture
def qx():
    return PolyOverRationals()


@pytest.fixture
def sqrt3_inv2(sqrt3):
    """Z[w,-3] with 2 inverted."""
    return Localized(sqrt3, (2,))


@pytest.fixture
def sqrt3_atoms(sqrt3):
    """Z[w,-3] with its nonprime atoms 2, 1+w, 1-w inverted."""
    w = sqrt3.w
    return Localized(sqrt3, (2, 1 + w, 1 - w))


@pytest.fixture
def line_sqrt5_inv2(sqrt5):
    """A·1 inside A_S for A = Z[w,-5], S generated by 2."""
    return LocModuleView(free_module(sqrt5, 1), (2,))


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)
