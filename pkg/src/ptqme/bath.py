"""Scalar bath functions for an Ohmic bath with a Drude (Lorentzian) cutoff.

The bath is fully characterised by the spectral density

    J(w) = gamma * w * w_c^2 / (w^2 + w_c^2),

extended to negative frequencies as an odd function, together with the
inverse temperature beta.  Every time- and frequency-domain quantity used
by the master-equation generators derives from the exponential
decomposition of the bath correlation function: a single Drude pole at
w = i*w_c plus the thermal (Matsubara) poles at w = i*nu_n with
nu_n = 2*pi*n/beta.

The Matsubara series converges only like 1/nu_n^2, so all half-sided
Fourier-transform quantities (the relaxation kernel ``tunneling_rate`` and
its derivative) are evaluated as an explicit ``n_matsubara``-term sum plus
an analytic tail estimate built from Hurwitz zeta functions.  The tail
makes the truncation error O(1/n_matsubara^4) instead of O(1/n_matsubara),
which is what allows the detailed-balance identity

    Re T(-d) = exp(beta*d) * Re T(d)

to hold to ~1e-12 relative at the default truncation of 1000 terms.

Note on t = 0: the correlation function of this spectral density diverges
logarithmically as t -> 0+ (its real part behaves like -gamma*w_c^2/pi *
ln(w_c t)); the truncated series is finite but truncation-dependent there.
All integrated quantities are regular.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

from .errors import ConfigurationError

__all__ = [
    "BathSpec",
    "ComplexRate",
    "spectral_density",
    "bose",
    "spectral_times_occupation",
    "correlation_function",
    "tunneling_rate",
    "tunneling_rate_t",
    "tunneling_rate_derivative",
]

_POLE_COLLISION_RTOL = 1e-9


@dataclass(frozen=True)
class BathSpec:
    """Ohmic-Drude bath parameters, all in atomic units.

    Attributes
    ----------
    gamma : float
        Coupling strength (m_e * E_h / hbar).
    omega_c : float
        Drude cutoff frequency (hartree).
    beta : float
        Inverse temperature (hartree^-1).
    n_matsubara : int
        Number of explicitly summed Matsubara terms.
    """

    gamma: float
    omega_c: float
    beta: float
    n_matsubara: int = 1000

    def __post_init__(self):
        if self.gamma < 0.0:
            raise ConfigurationError(f"gamma must be >= 0, got {self.gamma}")
        if self.omega_c <= 0.0:
            raise ConfigurationError(f"omega_c must be > 0, got {self.omega_c}")
        if self.beta <= 0.0:
            raise ConfigurationError(f"beta must be > 0, got {self.beta}")
        if self.n_matsubara < 1:
            raise ConfigurationError(
                f"n_matsubara must be >= 1, got {self.n_matsubara}"
            )
        # cot(beta*omega_c/2) in the Drude amplitude diverges when beta*omega_c
        # hits an even multiple of pi, i.e. when the Drude pole collides with a
        # Matsubara frequency.
        x = self.beta * self.omega_c / (2.0 * np.pi)
        k = round(x)
        if k >= 1 and abs(x - k) < _POLE_COLLISION_RTOL * k:
            raise ConfigurationError(
                "Drude pole collides with Matsubara frequency "
                f"{k} (beta*omega_c = {self.beta * self.omega_c:.6e} "
                f"~ 2*pi*{k}); shift omega_c or the temperature"
            )

    @property
    def nu(self) -> np.ndarray:
        """Matsubara frequencies nu_n = 2*pi*n/beta, n = 1..n_matsubara."""
        n = np.arange(1, self.n_matsubara + 1)
        return 2.0 * np.pi * n / self.beta

    @property
    def drude_amplitude(self) -> complex:
        """Coefficient of the exp(-omega_c*t) term of the correlation function."""
        half = 0.5 * self.gamma * self.omega_c**2
        return half * (1.0 / np.tan(0.5 * self.beta * self.omega_c) - 1.0j)

    @property
    def matsubara_amplitudes(self) -> np.ndarray:
        """Coefficients of the exp(-nu_n*t) terms (real for a Drude bath)."""
        nu = self.nu
        return -(2.0 * self.gamma / self.beta) * nu / (1.0 - (nu / self.omega_c) ** 2)


@dataclass(frozen=True)
class ComplexRate:
    """Asymptotic relaxation kernel value at one Bohr frequency.

    ``rate`` is the real part (a transition rate, hartree) and ``shift``
    the imaginary part (a coherent level shift, hartree).
    """

    rate: float
    shift: float

    @property
    def value(self) -> complex:
        return complex(self.rate, self.shift)


def spectral_density(bath: BathSpec, omega):
    """Odd-extended Ohmic-Drude spectral density J(w); J(0) = 0."""
    omega = np.asarray(omega, dtype=float)
    out = bath.gamma * omega * bath.omega_c**2 / (omega**2 + bath.omega_c**2)
    return out if out.ndim else float(out)


def bose(bath: BathSpec, omega):
    """Bose-Einstein occupation 1/(exp(beta*w) - 1); poles at w = 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega == 0.0):
        raise ValueError(
            "Bose occupation diverges at omega = 0; use "
            "spectral_times_occupation for the finite product"
        )
    out = 1.0 / np.expm1(bath.beta * omega)
    return out if out.ndim else float(out)


def spectral_times_occupation(bath: BathSpec, omega):
    """The product J(w) * n(w), with its finite limit gamma/beta at w = 0.

    This is the analytic value of the real part of the asymptotic
    relaxation kernel and serves as its independent closed form.
    """
    arr = np.atleast_1d(np.asarray(omega, dtype=float))
    out = np.empty(arr.shape, dtype=float)
    nz = arr != 0.0
    out[nz] = spectral_density(bath, arr[nz]) / np.expm1(bath.beta * arr[nz])
    out[~nz] = bath.gamma / bath.beta
    return out if np.ndim(omega) else float(out[0])


def correlation_function(bath: BathSpec, t):
    """Bath correlation function C(t) for t >= 0.

    Single Drude exponential plus ``n_matsubara`` thermal exponentials:

        C(t) = (gamma*w_c^2/2) [cot(beta*w_c/2) - i] exp(-w_c t)
             - (2*gamma/beta) sum_n nu_n/(1 - nu_n^2/w_c^2) exp(-nu_n t)

    The imaginary part is carried entirely by the Drude term.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0.0):
        raise ValueError("correlation_function is defined for t >= 0")
    drude = bath.drude_amplitude * np.exp(-bath.omega_c * t)
    mats = np.tensordot(
        bath.matsubara_amplitudes,
        np.exp(-np.multiply.outer(bath.nu, t)),
        axes=(0, 0),
    )
    out = drude + mats
    return out if out.ndim else complex(out)


def _tail_sums(bath: BathSpec) -> tuple[float, float, float, float]:
    """Hurwitz-zeta moments s^k * zeta(k, N+1) of the neglected Matsubara tail."""
    s = bath.beta / (2.0 * np.pi)
    n0 = bath.n_matsubara + 1
    return tuple(s**k * zeta(k, n0) for k in (2, 3, 4, 5))


def _kernel_tail(bath: BathSpec, delta: np.ndarray) -> np.ndarray:
    """Asymptotic estimate of sum_{n > N} B_n/(nu_n + i*delta).

    Large-nu expansion of nu/((nu^2 - w_c^2)(nu + i*delta)) through
    O(1/nu^5); valid whenever nu_{N+1} exceeds max(w_c, |delta|).
    """
    z2, z3, z4, z5 = _tail_sums(bath)
    wc2 = bath.omega_c**2
    pref = 2.0 * bath.gamma * wc2 / bath.beta
    return pref * (
        z2
        - 1.0j * delta * z3
        + (wc2 - delta**2) * z4
        + 1.0j * (delta**3 - delta * wc2) * z5
    )


def _kernel_tail_derivative(bath: BathSpec, delta: np.ndarray) -> np.ndarray:
    """d/d(delta) of ``_kernel_tail``."""
    _, z3, z4, z5 = _tail_sums(bath)
    wc2 = bath.omega_c**2
    pref = 2.0 * bath.gamma * wc2 / bath.beta
    return pref * (
        -1.0j * z3 - 2.0 * delta * z4 + 1.0j * (3.0 * delta**2 - wc2) * z5
    )


def tunneling_rate(bath: BathSpec, delta):
    """Asymptotic relaxation kernel T(d) = int_0^inf exp(-i*d*t) C(t) dt.

    Closed form over the exponential decomposition,

        T(d) = A/(w_c + i*d) + sum_n B_n/(nu_n + i*d) + tail,

    with A the Drude and B_n the Matsubara amplitudes.  The real part
    equals J(d) n(d) in the infinite-sum limit; with the zeta tail the
    identity holds to ~1e-12 relative at the default truncation.

    Accepts a scalar or an array of Bohr frequencies.
    """
    delta = np.asarray(delta, dtype=float)
    d = delta[..., np.newaxis]
    drude = bath.drude_amplitude / (bath.omega_c + 1.0j * delta)
    mats = np.sum(bath.matsubara_amplitudes / (bath.nu + 1.0j * d), axis=-1)
    out = drude + mats + _kernel_tail(bath, delta)
    return out if out.ndim else complex(out)


def tunneling_rate_t(bath: BathSpec, delta, t: float):
    """Finite-time relaxation kernel T_t(d) = int_0^t exp(-i*d*t') C(t') dt'.

    Same pole decomposition as :func:`tunneling_rate` with each term
    carrying its transient factor (1 - exp(-(a + i*d) t)).  The analytic
    tail is damped by the transient factor of the first neglected
    Matsubara frequency so that T_0 = 0 exactly and the t -> infinity
    limit reproduces :func:`tunneling_rate` exactly.
    """
    if t < 0.0:
        raise ValueError("tunneling_rate_t requires t >= 0")
    delta = np.asarray(delta, dtype=float)
    d = delta[..., np.newaxis]

    a_drude = bath.omega_c + 1.0j * delta
    drude = bath.drude_amplitude * (1.0 - np.exp(-a_drude * t)) / a_drude
    a_mats = bath.nu + 1.0j * d
    mats = np.sum(
        bath.matsubara_amplitudes * (1.0 - np.exp(-a_mats * t)) / a_mats, axis=-1
    )
    nu_next = 2.0 * np.pi * (bath.n_matsubara + 1) / bath.beta
    tail = _kernel_tail(bath, delta) * (1.0 - np.exp(-(nu_next + 1.0j * delta) * t))
    out = drude + mats + tail
    return out if out.ndim else complex(out)


def tunneling_rate_derivative(bath: BathSpec, delta):
    """First derivative dT/dd of the asymptotic relaxation kernel.

        dT/dd = -i*A/(w_c + i*d)^2 - sum_n i*B_n/(nu_n + i*d)^2 + tail'
    """
    delta = np.asarray(delta, dtype=float)
    d = delta[..., np.newaxis]
    drude = -1.0j * bath.drude_amplitude / (bath.omega_c + 1.0j * delta) ** 2
    mats = np.sum(
        -1.0j * bath.matsubara_amplitudes / (bath.nu + 1.0j * d) ** 2, axis=-1
    )
    out = drude + mats + _kernel_tail_derivative(bath, delta)
    return out if out.ndim else complex(out)


def tunneling_rate_converged(bath: BathSpec, delta, rtol: float = 1e-8) -> complex:
    """Evaluate T(d) with a doubling check on the Matsubara truncation.

    Returns the value at 2*n_matsubara terms and raises
    ``ConfigurationError`` if doubling the truncation moves the result by
    more than ``rtol`` relative.
    """
    coarse = tunneling_rate(bath, delta)
    fine_bath = BathSpec(bath.gamma, bath.omega_c, bath.beta, 2 * bath.n_matsubara)
    fine = tunneling_rate(fine_bath, delta)
    scale = max(abs(fine), abs(coarse))
    if scale > 0.0 and abs(fine - coarse) > rtol * scale:
        raise ConfigurationError(
            f"Matsubara truncation n={bath.n_matsubara} not converged at "
            f"delta={delta!r}: doubling moves T by "
            f"{abs(fine - coarse) / scale:.3e} relative"
        )
    return fine
