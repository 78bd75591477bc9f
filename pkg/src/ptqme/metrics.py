"""Quantitative comparison between propagation methods."""

from __future__ import annotations

import numpy as np

from .dynamics import Trajectory

__all__ = ["time_averaged_error", "steady_state_distance"]


def time_averaged_error(
    traj_a: Trajectory,
    traj_b: Trajectory,
    observable: int = 0,
    window: tuple[float, float] | None = None,
    kind: str = "mean-abs",
) -> float:
    """Time-averaged population error between two runs, in percent.

    Mean absolute difference of population ``observable`` over the
    window (trapezoidal rule), times 100:

        Delta = 100 / (t1 - t0) * int_{t0}^{t1} |p_a(t) - p_b(t)| dt.

    ``kind="rms"`` averages the squared difference and takes the root
    instead.  Time grids must agree on the overlap window; ``window``
    defaults to the full common range.
    """
    if kind not in ("mean-abs", "rms"):
        raise ValueError(f"unknown averaging kind '{kind}'")
    ta, tb = traj_a.times_au, traj_b.times_au
    lo = max(ta[0], tb[0])
    hi = min(ta[-1], tb[-1])
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    if hi <= lo:
        raise ValueError(f"empty overlap window [{lo}, {hi}]")
    sel_a = (ta >= lo) & (ta <= hi)
    sel_b = (tb >= lo) & (tb <= hi)
    t = ta[sel_a]
    t_other = tb[sel_b]
    if len(t) != len(t_other) or np.max(np.abs(t - t_other)) > 1e-9 * max(hi, 1.0):
        raise ValueError("trajectories are sampled on different time grids")
    diff = np.abs(
        traj_a.populations[sel_a, observable] - traj_b.populations[sel_b, observable]
    )
    if kind == "rms":
        return 100.0 * float(np.sqrt(np.trapezoid(diff**2, t) / (t[-1] - t[0])))
    return 100.0 * float(np.trapezoid(diff, t) / (t[-1] - t[0]))


def steady_state_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """Trace distance (1/2) sum |eig(rho_a - rho_b)|."""
    a = np.asarray(rho_a)
    b = np.asarray(rho_b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    diff = a - b
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))
