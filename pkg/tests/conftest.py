import numpy as np
import pytest

from hexaperfect.doubly_perfect import artisanal, u_lambda


@pytest.fixture(scope="session")
def lam_sparse():
    return artisanal("sparse")


@pytest.fixture(scope="session")
def lam_sym():
    return artisanal("sym")


@pytest.fixture(scope="session")
def u_sparse(lam_sparse):
    return u_lambda(lam_sparse)


@pytest.fixture(scope="session")
def u_sym(lam_sym):
    return u_lambda(lam_sym)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
