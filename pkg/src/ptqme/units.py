"""Physical constants and unit conversions.

Everything internal to the package is expressed in Hartree atomic units
(hbar = m_e = e = a_0 = 1).  Energies are hartree, lengths bohr, times in
atomic time units.  The converters here are the only place where external
units (kelvin, cm^-1, femtoseconds) enter.
"""

from __future__ import annotations

# Boltzmann constant in hartree per kelvin (CODATA 2018).
KB_HARTREE_PER_KELVIN = 3.166811563e-6

# One wavenumber (cm^-1) in hartree.
CM1_TO_HARTREE = 4.556335252912e-6

# One atomic time unit in femtoseconds.
AU_TIME_TO_FS = 0.02418884326586

# Proton mass in electron masses; the default reduced mass for the
# transfer coordinate when the user does not supply one.
PROTON_MASS_ME = 1836.15267343


def beta_from_temperature(temperature_K: float) -> float:
    """Inverse temperature (hartree^-1) for a temperature in kelvin."""
    if temperature_K <= 0.0:
        raise ValueError(f"temperature must be positive, got {temperature_K} K")
    return 1.0 / (KB_HARTREE_PER_KELVIN * temperature_K)


def temperature_from_beta(beta: float) -> float:
    """Temperature in kelvin for an inverse temperature in hartree^-1."""
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    return 1.0 / (KB_HARTREE_PER_KELVIN * beta)


def wavenumber_to_hartree(value_cm1: float) -> float:
    """Convert an energy in cm^-1 to hartree."""
    return value_cm1 * CM1_TO_HARTREE


def fs_to_au(t_fs: float) -> float:
    """Convert a time in femtoseconds to atomic units."""
    return t_fs / AU_TIME_TO_FS


def au_to_fs(t_au: float) -> float:
    """Convert a time in atomic units to femtoseconds."""
    return t_au * AU_TIME_TO_FS
