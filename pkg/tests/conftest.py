import pytest

from smoothdiv import build_omega, build_rho, build_rho_k
from smoothdiv.arith import build_spf_sieve
from smoothdiv.law import LimitLaw


@pytest.fixture(scope="session")
def rho():
    return build_rho(46.0)


@pytest.fixture(scope="session")
def rho_half():
    return build_rho_k(0.5, 46.0)


@pytest.fixture(scope="session")
def rho2():
    return build_rho_k(2.0, 14.0)


@pytest.fixture(scope="session")
def omega():
    return build_omega(15.0)


@pytest.fixture(scope="session")
def law(rho_half, omega):
    return LimitLaw(rho_half, omega)


@pytest.fixture(scope="session")
def sieve():
    return build_spf_sieve(10**6)
