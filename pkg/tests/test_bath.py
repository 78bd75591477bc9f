import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import exp1

from ptqme.bath import (
    BathSpec,
    bose,
    correlation_function,
    spectral_density,
    spectral_times_occupation,
    tunneling_rate,
    tunneling_rate_converged,
    tunneling_rate_derivative,
    tunneling_rate_t,
)
from ptqme.errors import ConfigurationError
from ptqme.units import KB_HARTREE_PER_KELVIN

from conftest import BETA_300K, DELTA_10


def make_bath(gamma=0.1, omega_c=2.28e-3, beta=BETA_300K, n_matsubara=1000):
    return BathSpec(gamma, omega_c, beta, n_matsubara)


# ---------------------------------------------------------------- J(w)


def test_spectral_density_zero():
    assert spectral_density(make_bath(), 0.0) == 0.0


def test_spectral_density_at_cutoff():
    b = make_bath()
    assert spectral_density(b, b.omega_c) == pytest.approx(0.5 * b.gamma * b.omega_c)


def test_spectral_density_odd():
    b = make_bath()
    w = 1.5 * b.omega_c
    assert spectral_density(b, -w) == -spectral_density(b, w)


# ---------------------------------------------------------------- Bose factor


def test_bose_ln2():
    b = make_bath()
    assert bose(b, np.log(2.0) / b.beta) == pytest.approx(1.0, rel=1e-12)


def test_bose_reflection_identity():
    b = make_bath()
    w = 1.0 / b.beta
    assert 1.0 + bose(b, w) == pytest.approx(-bose(b, -w), rel=1e-12)


def test_bose_at_300K_gap():
    # beta from k_B directly, occupation from the plain exponential
    beta = 1.0 / (KB_HARTREE_PER_KELVIN * 300.0)
    b = make_bath(beta=beta)
    expected = 1.0 / (np.exp(beta * DELTA_10) - 1.0)
    assert bose(b, DELTA_10) == pytest.approx(expected, rel=1e-12)


def test_bose_pole_rejected():
    with pytest.raises(ValueError):
        bose(make_bath(), 0.0)


def test_occupation_product_limit():
    b = make_bath()
    assert spectral_times_occupation(b, 0.0) == pytest.approx(b.gamma / b.beta)


# ---------------------------------------------------------------- BathSpec validation


def test_pole_collision_rejected():
    beta = BETA_300K
    with pytest.raises(ConfigurationError):
        BathSpec(0.1, 2.0 * np.pi / beta, beta, 10)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(gamma=-0.1),
        dict(omega_c=0.0),
        dict(beta=-1.0),
        dict(n_matsubara=0),
    ],
)
def test_invalid_parameters_rejected(kwargs):
    full = dict(gamma=0.1, omega_c=2.28e-3, beta=BETA_300K, n_matsubara=10)
    full.update(kwargs)
    with pytest.raises(ConfigurationError):
        BathSpec(**full)


# ---------------------------------------------------------------- correlation function


def _correlation_quadrature(bath, t, w_max=2.0):
    """(1/pi) int_0^inf J(w)[(1+n)e^{-iwt} + n e^{+iwt}] dw.

    Numerical quadrature on [0, w_max] plus the analytic high-frequency
    tail (where n(w) is negligible and J(w) ~ g*wc^2/w - g*wc^4/w^3),
    evaluated with complex exponential integrals.
    """

    def occupation(w):
        x = min(bath.beta * w, 700.0)  # underflows to 0 anyway beyond this
        return 1.0 / np.expm1(x)

    def integrand(w, part):
        n = occupation(w)
        val = spectral_density(bath, w) * (
            (1.0 + n) * np.exp(-1j * w * t) + n * np.exp(1j * w * t)
        )
        return val.real if part == "re" else val.imag

    re, _ = quad(integrand, 0, w_max, args=("re",), limit=800, epsabs=1e-15, epsrel=1e-13)
    im, _ = quad(integrand, 0, w_max, args=("im",), limit=800, epsabs=1e-15, epsrel=1e-13)
    z = 1j * w_max * t
    e1 = exp1(z)
    e2 = np.exp(-z) - z * e1
    e3 = 0.5 * (np.exp(-z) - z * e2)
    tail = bath.gamma * bath.omega_c**2 * e1 - bath.gamma * bath.omega_c**4 * e3 / w_max**2
    return (re + 1j * im + tail) / np.pi


def test_correlation_zero_coupling():
    b = make_bath(gamma=0.0)
    assert correlation_function(b, 50.0) == 0.0


def test_correlation_imaginary_part_is_drude_only():
    b = make_bath(gamma=0.4)
    t = np.array([0.5, 10.0, 300.0])
    expected = -0.5 * b.gamma * b.omega_c**2 * np.exp(-b.omega_c * t)
    np.testing.assert_allclose(correlation_function(b, t).imag, expected, rtol=1e-12)


@pytest.mark.parametrize("t", [5.0, 120.0, 800.0])
def test_correlation_vs_fourier_quadrature(t):
    b = make_bath(gamma=0.25)
    series = correlation_function(b, t)
    oracle = _correlation_quadrature(b, t)
    assert abs(series - oracle) <= 1e-6 * abs(oracle)


def test_correlation_negative_time_rejected():
    with pytest.raises(ValueError):
        correlation_function(make_bath(), -1.0)


def test_correlation_magnitude_decays():
    b = make_bath()
    t = np.linspace(5.0 / b.omega_c, 50.0 / b.omega_c, 40)
    mags = np.abs(correlation_function(b, t))
    assert np.all(np.diff(mags) < 0.0)


# ---------------------------------------------------------------- relaxation kernel


def test_kernel_real_part_equals_spectrum_times_occupation():
    b = make_bath()
    val = tunneling_rate(b, DELTA_10)
    oracle = spectral_times_occupation(b, DELTA_10)
    assert abs(val.real - oracle) <= 1e-6 * abs(oracle)


def test_kernel_zero_frequency_limit():
    b = make_bath()
    val = tunneling_rate(b, 0.0)
    assert val.real == pytest.approx(b.gamma / b.beta, rel=1e-10)


def test_kernel_detailed_balance():
    b = make_bath()
    plus = tunneling_rate(b, DELTA_10).real
    minus = tunneling_rate(b, -DELTA_10).real
    assert minus == pytest.approx(np.exp(b.beta * DELTA_10) * plus, rel=1e-10)


def test_kernel_positive_rates():
    b = make_bath(gamma=0.7)
    deltas = np.linspace(-0.02, 0.02, 41)
    assert np.all(tunneling_rate(b, deltas).real > 0.0)


def test_kernel_truncation_convergence():
    coarse = tunneling_rate(make_bath(n_matsubara=1000), DELTA_10)
    fine = tunneling_rate(make_bath(n_matsubara=2000), DELTA_10)
    assert abs(fine - coarse) <= 1e-8 * abs(fine)


def test_kernel_converged_helper():
    val = tunneling_rate_converged(make_bath(), DELTA_10)
    assert abs(val - tunneling_rate(make_bath(n_matsubara=2000), DELTA_10)) == 0.0


def test_kernel_zero_coupling():
    b = make_bath(gamma=0.0)
    assert tunneling_rate(b, DELTA_10) == 0.0
    assert tunneling_rate_derivative(b, DELTA_10) == 0.0


@settings(max_examples=30, deadline=None)
@given(delta=st.floats(min_value=-5e-3, max_value=5e-3))
def test_kernel_detailed_balance_property(delta):
    b = make_bath()
    plus = tunneling_rate(b, delta).real
    minus = tunneling_rate(b, -delta).real
    assert minus == pytest.approx(np.exp(b.beta * delta) * plus, rel=1e-9)


@settings(max_examples=20, deadline=None)
@given(gamma=st.floats(min_value=1e-4, max_value=2.0), delta=st.floats(-5e-3, 5e-3))
def test_linearity_in_gamma(gamma, delta):
    b1 = make_bath(gamma=gamma, n_matsubara=100)
    b2 = make_bath(gamma=2.0 * gamma, n_matsubara=100)
    assert tunneling_rate(b2, delta) == pytest.approx(2.0 * tunneling_rate(b1, delta), rel=1e-13)
    assert correlation_function(b2, 7.0) == pytest.approx(
        2.0 * correlation_function(b1, 7.0), rel=1e-13
    )
    assert spectral_density(b2, 3e-3) == pytest.approx(
        2.0 * spectral_density(b1, 3e-3), rel=1e-13
    )
    assert tunneling_rate_derivative(b2, delta) == pytest.approx(
        2.0 * tunneling_rate_derivative(b1, delta), rel=1e-13
    )


# ---------------------------------------------------------------- finite-time kernel


def test_finite_time_kernel_starts_at_zero():
    assert tunneling_rate_t(make_bath(), DELTA_10, 0.0) == 0.0


def test_finite_time_kernel_reaches_asymptote():
    b = make_bath()
    t_large = 60.0 / b.omega_c
    asym = tunneling_rate(b, DELTA_10)
    assert abs(tunneling_rate_t(b, DELTA_10, t_large) - asym) <= 1e-10 * abs(asym)


def test_finite_time_kernel_vs_quadrature():
    b = make_bath()
    fine = make_bath(n_matsubara=20000)
    t_up = 500.0

    def integrand(s, part):
        val = np.exp(-1j * DELTA_10 * s) * correlation_function(fine, s)
        return val.real if part == "re" else val.imag

    re, _ = quad(integrand, 0, t_up, args=("re",), limit=3000, epsabs=1e-14, epsrel=1e-12)
    im, _ = quad(integrand, 0, t_up, args=("im",), limit=3000, epsabs=1e-14, epsrel=1e-12)
    assert abs(tunneling_rate_t(b, DELTA_10, t_up) - (re + 1j * im)) < 1e-8


def test_finite_time_kernel_negative_time_rejected():
    with pytest.raises(ValueError):
        tunneling_rate_t(make_bath(), DELTA_10, -1.0)


# ---------------------------------------------------------------- kernel derivative


@pytest.mark.parametrize("delta", [DELTA_10, 0.0, -2.3e-3])
def test_kernel_derivative_vs_finite_difference(delta):
    b = make_bath()
    h = 1e-7
    fd = (tunneling_rate(b, delta + h) - tunneling_rate(b, delta - h)) / (2.0 * h)
    an = tunneling_rate_derivative(b, delta)
    assert abs(an - fd) <= 1e-6 * abs(an)
