import numpy as np
import pytest

from ptqme.bath import BathSpec
from ptqme.system import from_tables
from ptqme.units import beta_from_temperature

BETA_300K = beta_from_temperature(300.0)
DELTA_10 = 5.76478e-4  # tabulated E_1 - E_0


@pytest.fixture(scope="session")
def taa6():
    return from_tables()


@pytest.fixture(scope="session")
def bath_default():
    """T = 300 K, shipped default cutoff, production truncation."""
    return BathSpec(gamma=0.1, omega_c=2.28e-3, beta=BETA_300K, n_matsubara=1000)


def random_hermitian(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = x @ x.conj().T
    return rho / np.trace(rho).real
