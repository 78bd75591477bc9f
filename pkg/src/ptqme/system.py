"""Truncated N-level representation of the transfer coordinate.

An ``NLevelSystem`` is the pair (eigenenergies E_n, coupling matrix
q_nm = <n|q|m>) in the system eigenbasis, plus the machinery derived from
it: Bohr frequencies d_nm = E_n - E_m and the bath-induced quadratic
renormalization (gamma * w_c / 2) q^2, which is re-diagonalised in the
truncated basis.

The six-level system of the thioacetylacetone transfer coordinate is
built in under the name "taa6" (bare energies, no renormalization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import EigenSolution, Grid1D, PotentialCurve, matrix_elements, solve_schroedinger

__all__ = [
    "NLevelSystem",
    "from_tables",
    "bohr_frequencies",
    "renormalize",
    "renormalize_dvr",
    "hamiltonian_matrix",
    "system_from_dvr",
    "load_system",
    "save_system",
]

# Six-level transfer-coordinate system: eigenenergies (hartree) and
# coupling-operator matrix elements <n|q|m> (bohr) of the bare system
# Hamiltonian (no bath renormalization).
_TAA6_ENERGIES = np.array(
    [4.114537e-3, 4.691015e-3, 8.133116e-3, 1.110714e-2, 1.458100e-2, 1.881039e-2]
)
_TAA6_COUPLING = np.array(
    [
        [-0.3813, 0.3325, 0.0837, 0.1321, 0.0564, 0.0289],
        [0.3325, 0.6712, -0.2931, 0.0230, -0.0498, 0.0008],
        [0.0837, -0.2931, 0.4089, -0.4241, 0.0559, -0.0514],
        [0.1321, 0.0230, -0.4241, 0.1598, -0.5011, -0.0085],
        [0.0564, -0.0498, 0.0559, -0.5011, 0.2696, -0.5258],
        [0.0289, 0.0008, -0.0514, -0.0085, -0.5258, 0.2752],
    ]
)

_DEGENERACY_TOL = 1e-12
_SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class NLevelSystem:
    """Energies (hartree) and coupling matrix (bohr) in the eigenbasis.

    Degenerate spectra are rejected: the canonical corrections divide by
    every Bohr frequency, so the theory as implemented needs distinct
    levels.
    """

    energies: np.ndarray
    coupling: np.ndarray
    label: str = ""

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        q = np.asarray(self.coupling, dtype=float)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "coupling", q)
        if e.ndim != 1 or len(e) < 1:
            raise ValueError("energies must be a non-empty 1D array")
        if q.shape != (len(e), len(e)):
            raise ValueError(
                f"coupling shape {q.shape} does not match {len(e)} levels"
            )
        if np.any(np.diff(e) <= _DEGENERACY_TOL):
            raise ValueError(
                f"energies must be strictly increasing (system '{self.label}')"
            )
        if np.max(np.abs(q - q.T)) > _SYMMETRY_TOL * max(1.0, np.max(np.abs(q))):
            raise ValueError(f"coupling matrix must be symmetric ('{self.label}')")

    @property
    def n_levels(self) -> int:
        return len(self.energies)


def from_tables() -> NLevelSystem:
    """The built-in bare six-level system ("taa6")."""
    return NLevelSystem(
        energies=_TAA6_ENERGIES.copy(),
        coupling=_TAA6_COUPLING.copy(),
        label="taa6",
    )


def bohr_frequencies(sys: NLevelSystem) -> np.ndarray:
    """Antisymmetric gap matrix d_nm = E_n - E_m (hartree)."""
    e = sys.energies
    return e[:, None] - e[None, :]


def hamiltonian_matrix(sys: NLevelSystem) -> np.ndarray:
    """diag(E_n) as a dense matrix."""
    return np.diag(sys.energies)


def renormalize(sys: NLevelSystem, gamma: float, omega_c: float) -> NLevelSystem:
    """Add the bath-induced term (gamma*w_c/2) q^2 and re-diagonalise.

    In the truncated basis q^2 is approximated by the matrix square of
    the coupling matrix (exact only in the full basis; the DVR route
    :func:`renormalize_dvr` avoids the truncation).  Energies and the
    coupling matrix are returned in the new eigenbasis, with the
    eigenvector sign convention that the largest component is positive.
    For gamma = 0 the input is returned unchanged.
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if omega_c <= 0.0:
        raise ValueError(f"omega_c must be > 0, got {omega_c}")
    if gamma == 0.0:
        return sys
    q = sys.coupling
    h = np.diag(sys.energies) + 0.5 * gamma * omega_c * (q @ q)
    energies, vecs = np.linalg.eigh(h)
    for col in range(vecs.shape[1]):
        peak = np.argmax(np.abs(vecs[:, col]))
        if vecs[peak, col] < 0.0:
            vecs[:, col] *= -1.0
    q_new = vecs.T @ q @ vecs
    q_new = 0.5 * (q_new + q_new.T)
    return NLevelSystem(
        energies=energies,
        coupling=q_new,
        label=f"{sys.label}+ren(gamma={gamma:g})",
    )


def renormalize_dvr(
    grid: Grid1D,
    potential: PotentialCurve,
    mass: float,
    n_levels: int,
    gamma: float,
    omega_c: float,
) -> tuple[NLevelSystem, EigenSolution]:
    """Renormalize at the potential level: V -> V + (gamma*w_c/2) q^2.

    Re-solves the grid problem with the shifted potential, so the
    quadratic term acts exactly rather than through the truncated basis.
    Returns the system and the underlying grid solution (needed e.g. for
    wavepacket projection).
    """
    if gamma < 0.0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    base = potential.evaluate

    def shifted(q):
        q = np.asarray(q, dtype=float)
        return base(q) + 0.5 * gamma * omega_c * q**2

    pot = PotentialCurve(evaluate=shifted, label=f"{potential.label}+ren")
    sol = solve_schroedinger(grid, pot, mass, n_levels)
    return system_from_dvr(sol, label=f"{pot.label}[N={n_levels}]"), sol


def system_from_dvr(sol: EigenSolution, label: str = "dvr") -> NLevelSystem:
    """Package a grid solution as an N-level system (q from quadrature)."""
    return NLevelSystem(
        energies=sol.energies.copy(),
        coupling=matrix_elements(sol),
        label=label,
    )


def save_system(sys: NLevelSystem, path) -> None:
    """Write N, energies, and the row-major coupling matrix as plain text."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# n_levels energies(hartree) coupling(bohr, row-major)\n")
        fh.write(f"{sys.n_levels}\n")
        fh.write(" ".join(f"{e:.16e}" for e in sys.energies) + "\n")
        for row in sys.coupling:
            fh.write(" ".join(f"{v:.16e}" for v in row) + "\n")


def load_system(path, label: str | None = None) -> NLevelSystem:
    """Read a system written by :func:`save_system` (atomic units)."""
    with open(path, "r", encoding="ascii") as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty system file")
    n = int(rows[0][0])
    if len(rows) != 2 + n:
        raise ValueError(
            f"{path}: expected {2 + n} data rows for n_levels={n}, got {len(rows)}"
        )
    energies = np.array([float(v) for v in rows[1]])
    if len(energies) != n:
        raise ValueError(f"{path}: expected {n} energies, got {len(energies)}")
    coupling = np.array([[float(v) for v in row] for row in rows[2:]])
    return NLevelSystem(
        energies=energies, coupling=coupling, label=label or str(path)
    )
