"""Equilibrium states and coupling-regime classification.

The bare Gibbs state tau_G is the zeroth-order equilibrium; the
second-order mean-force state adds the canonical correction evaluated on
tau_G with a scalar subtraction that restores normalisation:

    tau_MF2 = tau_G + C2[tau_G] - tau_G * tr(C2[tau_G]).

Its coherences are the inverse-commutator image of the dissipator acting
on tau_G; its populations shift away from the Gibbs ratios linearly in
the coupling strength.

Coupling regimes follow the ground-state-population error convention:
below eps = 4e-3 between Gibbs and mean-force states the coupling is
"ultraweak" (UW); above, "weak" (WK); if additionally the mean-force
state deviates from the exact (hierarchy) steady state by more than eps,
"intermediate" (IM).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bath import BathSpec
from .ccqme import canonical_map
from .generators import unvec, vec
from .system import NLevelSystem

__all__ = [
    "EquilibriumStates",
    "RegimeReport",
    "REGIME_EPSILON",
    "gibbs_state",
    "mean_force_gibbs2",
    "classify_regime",
]

REGIME_EPSILON = 4e-3


@dataclass(frozen=True)
class EquilibriumStates:
    """Gibbs state, second-order mean-force state, and their difference."""

    gibbs: np.ndarray
    mean_force2: np.ndarray
    correction: np.ndarray


@dataclass(frozen=True)
class RegimeReport:
    """Coupling-regime classification at one coupling strength."""

    gamma: float
    error_gibbs_vs_mf2: float
    error_mf2_vs_exact: float | None
    label: str

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "error_gibbs_vs_mf2": self.error_gibbs_vs_mf2,
            "error_mf2_vs_exact": self.error_mf2_vs_exact,
            "label": self.label,
        }


def gibbs_state(sys: NLevelSystem, beta: float) -> np.ndarray:
    """Diagonal thermal state with populations exp(-beta(E_n - E_0))/Z."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    # subtract the ground energy before exponentiating for numeric safety
    w = np.exp(-beta * (sys.energies - sys.energies[0]))
    return np.diag(w / np.sum(w)).astype(complex)


def mean_force_gibbs2(sys: NLevelSystem, bath: BathSpec) -> EquilibriumStates:
    """Second-order mean-force equilibrium via the canonical map."""
    tau_g = gibbs_state(sys, bath.beta)
    cmap = canonical_map(sys, bath)
    corr = unvec(cmap.matrix @ vec(tau_g))
    corr = 0.5 * (corr + corr.conj().T)
    corr -= tau_g * np.trace(corr).real
    tau_mf = tau_g + corr
    min_eig = float(np.linalg.eigvalsh(tau_mf).min())
    if min_eig < -1e-10:
        warnings.warn(
            f"second-order mean-force state has negative eigenvalue {min_eig:.3e} "
            f"(gamma={bath.gamma:g}); second order is unreliable here",
            stacklevel=2,
        )
    return EquilibriumStates(gibbs=tau_g, mean_force2=tau_mf, correction=corr)


def classify_regime(
    sys: NLevelSystem,
    bath: BathSpec,
    exact_steady: np.ndarray | None = None,
    epsilon: float = REGIME_EPSILON,
) -> RegimeReport:
    """Classify the coupling strength as UW, WK, or IM.

    The error measure is the relative ground-state population difference.
    IM detection needs the numerically exact steady state; without it the
    report carries ``error_mf2_vs_exact = None`` and cannot return "IM".
    """
    states = mean_force_gibbs2(sys, bath)
    p0_g = states.gibbs[0, 0].real
    p0_mf = states.mean_force2[0, 0].real
    err_g = abs(p0_g - p0_mf) / abs(p0_mf)

    err_exact = None
    label = "UW" if err_g < epsilon else "WK"
    if exact_steady is not None:
        p0_ex = np.asarray(exact_steady)[0, 0].real
        err_exact = abs(p0_ex - p0_mf) / abs(p0_mf)
        if err_exact > epsilon:
            label = "IM"
    return RegimeReport(
        gamma=bath.gamma,
        error_gibbs_vs_mf2=err_g,
        error_mf2_vs_exact=err_exact,
        label=label,
    )
