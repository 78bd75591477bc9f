"""Time propagation and observable extraction.

One fixed-step classical Runge-Kutta-4 loop serves every generator in
the package: dense master-equation superoperators and the sparse
stacked hierarchy alike (anything exposing ``matrix`` acting on a
vectorised state).  For a linear time-independent generator RK4 is the
degree-4 Taylor polynomial of the exact propagator, so step-halving
convergence checks are clean fourth-order.

Observables (populations, selected coherences, the coordinate
expectation value, trace, smallest eigenvalue, Hermiticity drift) are
sampled every ``stride`` steps from the physical density matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import PropagationError
from .grid import EigenSolution
from .system import NLevelSystem
from .units import AU_TIME_TO_FS, PROTON_MASS_ME, wavenumber_to_hartree

__all__ = [
    "Trajectory",
    "WavepacketSpec",
    "propagate",
    "initial_eigenstate",
    "initial_wavepacket",
    "expectation_q",
    "barrier_momentum",
    "BARRIER_HEIGHT_HARTREE",
]

# Barrier of the transfer-coordinate double well, 1573.3 cm^-1.
BARRIER_HEIGHT_HARTREE = wavenumber_to_hartree(1573.3)

_IMAG_TOL = 1e-10


@dataclass(frozen=True)
class Trajectory:
    """Sampled observables along one propagation run."""

    times_au: np.ndarray
    populations: np.ndarray
    coherences: dict[tuple[int, int], np.ndarray]
    q_expect: np.ndarray
    trace: np.ndarray
    min_eigenvalue: np.ndarray
    hermiticity_drift: float

    @property
    def times_fs(self) -> np.ndarray:
        return self.times_au * AU_TIME_TO_FS

    @property
    def n_levels(self) -> int:
        return self.populations.shape[1]

    def final_state_populations(self) -> np.ndarray:
        return self.populations[-1]

    def to_csv(self, path) -> None:
        """Write the deterministic column layout:

        time_fs, p_0..p_{N-1}, re/im of each requested coherence (in
        ascending index order), q_expect_bohr, trace, min_eig.
        """
        keys = sorted(self.coherences)
        header = ["time_fs"]
        header += [f"p_{n}" for n in range(self.n_levels)]
        for n, m in keys:
            header += [f"re_rho_{n}{m}", f"im_rho_{n}{m}"]
        header += ["q_expect_bohr", "trace", "min_eig"]
        cols = [self.times_fs] + [self.populations[:, n] for n in range(self.n_levels)]
        for key in keys:
            cols += [self.coherences[key].real, self.coherences[key].imag]
        cols += [self.q_expect, self.trace, self.min_eigenvalue]
        data = np.column_stack(cols)
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in data:
                fh.write(",".join(f"{v:.12e}" for v in row) + "\n")


@dataclass(frozen=True)
class WavepacketSpec:
    """Gaussian wavepacket parameters on the transfer coordinate."""

    center: float
    width: float
    momentum: float | None = None
    mass: float = PROTON_MASS_ME

    def __post_init__(self):
        if self.width <= 0.0:
            raise ValueError(f"width must be positive, got {self.width}")
        if self.mass <= 0.0:
            raise ValueError(f"mass must be positive, got {self.mass}")

    @property
    def k0(self) -> float:
        """Momentum; defaults to the barrier-height kinetic energy."""
        if self.momentum is not None:
            return self.momentum
        return barrier_momentum(self.mass)


def barrier_momentum(
    mass: float, barrier: float = BARRIER_HEIGHT_HARTREE
) -> float:
    """k_0 = sqrt(2 m E_B): momentum with kinetic energy = barrier height."""
    return float(np.sqrt(2.0 * mass * barrier))


def initial_eigenstate(sys: NLevelSystem, n: int) -> np.ndarray:
    """Elementary projector |n><n| as a density matrix."""
    if not 0 <= n < sys.n_levels:
        raise ValueError(f"state index {n} outside [0, {sys.n_levels})")
    rho = np.zeros((sys.n_levels, sys.n_levels), dtype=complex)
    rho[n, n] = 1.0
    return rho


def initial_wavepacket(
    sol: EigenSolution,
    wp: WavepacketSpec,
    n_levels: int,
    leakage_bound: float = 0.05,
) -> tuple[np.ndarray, float]:
    """Project a Gaussian wavepacket onto the lowest ``n_levels`` states.

    psi(q) = (2/(pi a^2))^(1/4) exp(-(q - q_c)^2/a^2) exp(i k0 (q - q_c)),
    grid-normalised before projecting.  Returns the renormalised density
    matrix and the leakage 1 - sum_n |c_n|^2 lost to truncation; leakage
    above ``leakage_bound`` triggers a warning, never silent truncation.
    """
    if n_levels > sol.n_states:
        raise ValueError(
            f"wavepacket projection needs {n_levels} states, solution has "
            f"{sol.n_states}"
        )
    q = sol.grid.points
    dq = sol.grid.spacing
    psi = (2.0 / (np.pi * wp.width**2)) ** 0.25 * np.exp(
        -((q - wp.center) ** 2) / wp.width**2
        + 1.0j * wp.k0 * (q - wp.center)
    )
    psi = psi / np.sqrt(np.sum(np.abs(psi) ** 2) * dq)
    coeff = sol.wavefunctions[:n_levels] @ psi * dq
    captured = float(np.sum(np.abs(coeff) ** 2))
    leakage = 1.0 - captured
    if leakage > leakage_bound:
        warnings.warn(
            f"wavepacket leaks {leakage:.3f} of its norm out of the lowest "
            f"{n_levels} states (bound {leakage_bound}); state renormalised",
            stacklevel=2,
        )
    rho = np.outer(coeff, coeff.conj()) / captured
    return rho, leakage


def expectation_q(sys: NLevelSystem, rho: np.ndarray) -> float:
    """tr(rho q); the imaginary residue must be negligible."""
    val = complex(np.trace(np.asarray(rho) @ sys.coupling))
    if abs(val.imag) > _IMAG_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"<q> has imaginary residue {val.imag:.3e}")
    return val.real


def propagate(
    generator,
    rho0: np.ndarray,
    t_max: float,
    dt: float,
    stride: int = 50,
    system: NLevelSystem | None = None,
    coherences: tuple[tuple[int, int], ...] = (),
) -> Trajectory:
    """Fixed-step RK4 propagation of vec(rho) under a linear generator.

    ``generator`` is either a dense ``Superoperator`` or a sparse
    ``HeomGenerator`` (duck-typed: hierarchy generators embed/extract
    the physical block via ``initial_state``/``root``).  Observables are
    recorded every ``stride`` steps and at the final step.  Non-finite
    states abort with the offending time.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_max < dt:
        raise ValueError(f"t_max = {t_max} is shorter than one step dt = {dt}")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")

    hierarchical = hasattr(generator, "initial_state")
    if hierarchical:
        state = generator.initial_state(rho0)
        n = generator.n_levels
        extract = generator.root
    else:
        state = np.asarray(rho0, dtype=complex).reshape(-1)
        n = int(round(np.sqrt(state.size)))
        extract = lambda s: s.reshape(n, n)
    matrix = getattr(generator, "fast_action", None) or generator.matrix

    n_steps = int(round(t_max / dt))
    rec_steps = list(range(0, n_steps, stride))
    if rec_steps[-1] != n_steps:
        rec_steps.append(n_steps)
    n_rec = len(rec_steps)

    times = np.empty(n_rec)
    populations = np.empty((n_rec, n))
    coh = {key: np.empty(n_rec, dtype=complex) for key in coherences}
    q_expect = np.full(n_rec, np.nan)
    trace = np.empty(n_rec)
    min_eig = np.empty(n_rec)
    herm_drift = 0.0

    q_op = system.coupling if system is not None else None
    rec = 0
    next_rec = rec_steps[0]
    for step in range(n_steps + 1):
        if step == next_rec:
            rho = extract(state)
            if not np.all(np.isfinite(rho)):
                raise PropagationError(
                    f"non-finite state at t = {step * dt:g} a.u.", step * dt
                )
            herm_drift = max(herm_drift, float(np.max(np.abs(rho - rho.conj().T))))
            herm = 0.5 * (rho + rho.conj().T)
            times[rec] = step * dt
            populations[rec] = np.diag(herm).real
            for key in coherences:
                coh[key][rec] = rho[key]
            if q_op is not None:
                q_expect[rec] = np.trace(herm @ q_op).real
            trace[rec] = np.trace(rho).real
            min_eig[rec] = float(np.linalg.eigvalsh(herm).min())
            rec += 1
            next_rec = rec_steps[rec] if rec < n_rec else -1
        if step == n_steps:
            break
        k1 = matrix @ state
        k2 = matrix @ (state + (0.5 * dt) * k1)
        k3 = matrix @ (state + (0.5 * dt) * k2)
        k4 = matrix @ (state + dt * k3)
        state = state + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)

    return Trajectory(
        times_au=times,
        populations=populations,
        coherences=coh,
        q_expect=q_expect,
        trace=trace,
        min_eigenvalue=min_eig,
        hermiticity_drift=herm_drift,
    )
