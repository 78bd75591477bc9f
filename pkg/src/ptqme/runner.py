"""Scenario orchestration: build, propagate, and write artifacts.

One worker handles one (method, gamma) pair and writes only its own
trajectory and steady-state files; the orchestrator collects the
returned summaries and writes the single machine-readable run summary.
Nothing in the pipeline draws random numbers, so identical configs
produce byte-identical data files.
"""

from __future__ import annotations

import json
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .bath import BathSpec
from .ccqme import ccqme_generator
from .config import RunConfig, validate
from .dynamics import (
    Trajectory,
    WavepacketSpec,
    initial_eigenstate,
    initial_wavepacket,
    propagate,
)
from .equilibrium import classify_regime, mean_force_gibbs2
from .errors import ConfigurationError
from .generators import liouvillian, steady_state
from .grid import SURROGATE_LEFT_MINIMUM, named_potential, potential_from_file
from .heom import heom_generator, heom_steady_state
from .metrics import steady_state_distance, time_averaged_error
from .system import NLevelSystem, from_tables, load_system, renormalize, renormalize_dvr
from .units import PROTON_MASS_ME

__all__ = ["run", "build_system", "build_generator"]


def _base_system(cfg: RunConfig):
    if cfg.system_source == "builtin":
        return from_tables()
    if cfg.system_source == "file":
        return load_system(cfg.system_file)
    raise ValueError(f"no table system for source {cfg.system_source!r}")


def _potential(cfg: RunConfig):
    name = cfg.potential
    if name.startswith("file:"):
        return potential_from_file(name[5:])
    return named_potential(name)


def build_system(cfg: RunConfig, gamma: float):
    """Renormalized system for one coupling strength.

    Table-based sources renormalize in the truncated basis; the DVR
    source renormalizes the potential and re-solves (exact route).
    Returns (system, grid_solution_or_None).
    """
    if cfg.system_source == "dvr":
        sys, sol = renormalize_dvr(
            cfg.grid, _potential(cfg), cfg.mass, cfg.n_levels, gamma, cfg.omega_c
        )
        return sys, sol
    base = _base_system(cfg)
    if cfg.n_levels < base.n_levels:
        base = NLevelSystem(
            base.energies[: cfg.n_levels],
            base.coupling[: cfg.n_levels, : cfg.n_levels],
            label=f"{base.label}[:{cfg.n_levels}]",
        )
    return renormalize(base, gamma, cfg.omega_c), None


def build_generator(method: str, sys, bath: BathSpec, cfg: RunConfig):
    if method == "redfield":
        return liouvillian(sys, bath, secular=cfg.secular)
    if method == "ccqme":
        return ccqme_generator(sys, bath, secular=cfg.secular)
    if method == "heom":
        return heom_generator(sys, bath, cfg.heom)
    raise ValueError(f"unknown method {method!r}")


def _initial_state(cfg: RunConfig, sys, sol):
    if cfg.scenario in ("relax-ground", "steady-compare", "sweep"):
        return initial_eigenstate(sys, 0), None
    if cfg.scenario == "relax-excited":
        return initial_eigenstate(sys, 1), None
    if cfg.scenario == "wavepacket":
        center = cfg.wp_center if cfg.wp_center is not None else SURROGATE_LEFT_MINIMUM
        mass = cfg.wp_mass if cfg.wp_mass is not None else PROTON_MASS_ME
        wp = WavepacketSpec(center=center, width=cfg.wp_width, mass=mass)
        rho0, leakage = initial_wavepacket(sol, wp, cfg.n_levels)
        return rho0, leakage
    raise ValueError(f"no initial state for scenario {cfg.scenario!r}")


def _steady(method: str, sys, bath: BathSpec, cfg: RunConfig):
    if method == "heom":
        return heom_steady_state(sys, bath, cfg.heom)
    return steady_state(build_generator(method, sys, bath, cfg))


def _write_state(path: str, rho: np.ndarray) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# steady-state density matrix, N={rho.shape[0]}\n")
        fh.write("# populations: " + " ".join(f"{p:.12e}" for p in np.diag(rho).real) + "\n")
        for row in rho:
            fh.write(" ".join(f"{v.real:+.12e}{v.imag:+.12e}j" for v in row) + "\n")


def _coherence_set(cfg: RunConfig, n: int):
    if cfg.scenario == "wavepacket":
        return tuple((i, j) for i in range(min(4, n)) for j in range(i + 1, min(4, n)))
    return ((0, 1),) if n > 1 else ()


@dataclass
class _WorkerResult:
    method: str
    gamma: float
    trajectory_file: str | None
    steady_file: str
    final_populations: list
    steady_populations: list
    trace_drift: float
    hermiticity_drift: float
    leakage: float | None


def _run_one(args) -> _WorkerResult:
    cfg, method, gamma = args
    bath = BathSpec(gamma, cfg.omega_c, cfg.beta, cfg.n_matsubara)
    sys, sol = build_system(cfg, gamma)
    rho0, leakage = _initial_state(cfg, sys, sol)

    traj_file = None
    final_pops: list = []
    trace_drift = 0.0
    herm_drift = 0.0
    if cfg.scenario != "steady-compare":
        gen = build_generator(method, sys, bath, cfg)
        traj = propagate(
            gen,
            rho0,
            t_max=cfg.t_max,
            dt=cfg.dt,
            stride=cfg.stride,
            system=sys,
            coherences=_coherence_set(cfg, sys.n_levels),
        )
        traj_file = os.path.join(
            cfg.out_dir, f"{cfg.scenario}_{method}_gamma-{gamma:g}.csv"
        )
        traj.to_csv(traj_file)
        final_pops = [float(p) for p in traj.final_state_populations()]
        trace_drift = float(np.max(np.abs(traj.trace - 1.0)))
        herm_drift = traj.hermiticity_drift

    if gamma > 0.0:
        rho_ss = _steady(method, sys, bath, cfg)
        steady_file = os.path.join(cfg.out_dir, f"steady_{method}_gamma-{gamma:g}.txt")
        _write_state(steady_file, rho_ss)
        steady_pops = [float(p) for p in np.diag(rho_ss).real]
    else:
        # no relaxation without coupling: there is nothing stationary to report
        steady_file = None
        steady_pops = []

    return _WorkerResult(
        method=method,
        gamma=gamma,
        trajectory_file=traj_file,
        steady_file=steady_file,
        final_populations=final_pops,
        steady_populations=steady_pops,
        trace_drift=trace_drift,
        hermiticity_drift=herm_drift,
        leakage=leakage,
    )


def _load_trajectory(path: str, n_levels: int) -> Trajectory:
    """Read back a worker's CSV for metric evaluation."""
    from .units import fs_to_au

    data = np.loadtxt(path, delimiter=",", skiprows=1)
    times_au = np.array([fs_to_au(t) for t in data[:, 0]])
    pops = data[:, 1 : 1 + n_levels]
    return Trajectory(
        times_au=times_au,
        populations=pops,
        coherences={},
        q_expect=data[:, -3],
        trace=data[:, -2],
        min_eigenvalue=data[:, -1],
        hermiticity_drift=0.0,
    )


def run(cfg: RunConfig, threads: int = 1) -> dict:
    """Execute a validated config; returns the summary dict it wrote."""
    problems = validate(cfg)
    if problems:
        raise ConfigurationError(
            "configuration invalid:\n  " + "\n  ".join(problems)
        )
    os.makedirs(cfg.out_dir, exist_ok=True)

    jobs = [(cfg, m, g) for g in cfg.gammas for m in cfg.methods]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]
    by_key = {(r.method, r.gamma): r for r in results}

    # regime classification per gamma (uses the hierarchy steady state when run)
    regimes = []
    distances = []
    for g in cfg.gammas:
        bath = BathSpec(g, cfg.omega_c, cfg.beta, cfg.n_matsubara)
        sys, _ = build_system(cfg, g)
        exact = None
        if ("heom", g) in by_key and g > 0:
            states = mean_force_gibbs2(sys, bath)
            exact_res = by_key[("heom", g)]
            exact = np.diag(exact_res.steady_populations).astype(complex)
            distances.append(
                {
                    "gamma": g,
                    "trace_distance_gibbs_mf2": steady_state_distance(
                        states.gibbs, states.mean_force2
                    ),
                }
            )
        regimes.append(classify_regime(sys, bath, exact).to_dict())

    # sweep error metrics against the exact reference
    errors = []
    if cfg.scenario == "sweep":
        n = build_system(cfg, cfg.gammas[0])[0].n_levels
        for g in cfg.gammas:
            row = {"gamma": g}
            trajs = {
                m: _load_trajectory(by_key[(m, g)].trajectory_file, n)
                for m in cfg.methods
                if by_key[(m, g)].trajectory_file
            }
            if "ccqme" in trajs and "heom" in trajs:
                row["delta_ccqme_heom"] = time_averaged_error(trajs["ccqme"], trajs["heom"])
            if "redfield" in trajs and "heom" in trajs:
                row["delta_redfield_heom"] = time_averaged_error(trajs["redfield"], trajs["heom"])
            if "redfield" in trajs and "ccqme" in trajs:
                row["delta_redfield_ccqme"] = time_averaged_error(trajs["redfield"], trajs["ccqme"])
            errors.append(row)
        err_file = os.path.join(cfg.out_dir, "sweep_errors.csv")
        cols = ["gamma", "delta_ccqme_heom", "delta_redfield_heom", "delta_redfield_ccqme"]
        with open(err_file, "w", encoding="ascii", newline="\n") as fh:
            fh.write(",".join(cols) + "\n")
            for row in errors:
                fh.write(",".join(f"{row.get(c, float('nan')):.12e}" if c != "gamma"
                                  else f"{row[c]:g}" for c in cols) + "\n")

    summary = {
        "version": __version__,
        "config": {
            "system": {
                "source": cfg.system_source,
                "name": cfg.system_name,
                "file": cfg.system_file,
                "potential": cfg.potential if cfg.system_source == "dvr" else None,
                "n_levels": cfg.n_levels,
                "mass": {"value": cfg.mass, "provenance": "fit"}
                if cfg.system_source == "dvr"
                else None,
            },
            "bath": {
                "gamma": list(cfg.gammas),
                "omega_c_hartree": {
                    "value": cfg.omega_c,
                    "provenance": cfg.omega_c_provenance,
                },
                "temperature_K": {"value": cfg.temperature, "provenance": "paper"},
                "beta_hartree^-1": cfg.beta,
                "n_matsubara": cfg.n_matsubara,
            },
            "run": {
                "scenario": cfg.scenario,
                "methods": list(cfg.methods),
                "secular": cfg.secular,
            },
            "propagation": {
                "t_max_au": cfg.t_max,
                "dt_au": cfg.dt,
                "stride": cfg.stride,
            },
            "heom": {
                "depth": cfg.heom.depth,
                "n_exponentials": cfg.heom.n_exponentials,
                "terminator": cfg.heom.terminator,
            },
            "wavepacket": {
                "center_bohr": cfg.wp_center
                if cfg.wp_center is not None
                else SURROGATE_LEFT_MINIMUM,
                "width_bohr": cfg.wp_width,
                "mass": {
                    "value": cfg.wp_mass if cfg.wp_mass is not None else PROTON_MASS_ME,
                    "provenance": cfg.wp_mass_provenance,
                },
            }
            if cfg.scenario == "wavepacket"
            else None,
        },
        "runs": [
            {
                "method": r.method,
                "gamma": r.gamma,
                "trajectory_file": r.trajectory_file,
                "steady_file": r.steady_file,
                "final_populations": r.final_populations,
                "steady_populations": r.steady_populations,
                "trace_drift": r.trace_drift,
                "hermiticity_drift": r.hermiticity_drift,
                "wavepacket_leakage": r.leakage,
            }
            for r in results
        ],
        "regimes": regimes,
        "equilibrium_distances": distances,
        "sweep_errors": errors,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
    }
    with open(os.path.join(cfg.out_dir, "summary.json"), "w", encoding="ascii") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
