import pytest
from hypothesis import HealthCheck, settings

from frobtest import PolynomialRing, builtin_ring

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def fermat2():
    return builtin_ring("fermat2")


@pytest.fixture(scope="session")
def poly2():
    return builtin_ring("poly2")


@pytest.fixture(scope="session")
def nonreduced2():
    return builtin_ring("nonreduced2")


@pytest.fixture(scope="session")
def sr2():
    return builtin_ring("sr2")


@pytest.fixture(scope="session")
def fermat5():
    return builtin_ring("fermat5")


@pytest.fixture
def F2xy():
    return PolynomialRing(2, ("x", "y"))


@pytest.fixture
def F2xyz():
    return PolynomialRing(2, ("x", "y", "z"))
