"""Run configuration: INI-style file with explicit unit tags.

Physical quantities in the config carry a unit word after the number
("5e-3 hartree", "500 cm-1", "300 kelvin", "2500 fs", "1 au"); they are
converted to atomic units at parse time.  Dimensionless numbers (the
coupling strength, counts, flags) are plain.

Example::

    [system]
    source = builtin
    name = taa6

    [bath]
    gamma = 0.1, 0.3, 0.5, 1.0
    omega_c = 2.28e-3 hartree
    temperature = 300 kelvin
    n_matsubara = 1000

    [run]
    scenario = relax-ground
    methods = redfield, ccqme, heom
    secular = true

    [propagation]
    t_max = 2500 fs
    dt = 1 au
    stride = 50

    [heom]
    depth = 5
    n_exponentials = 3
    terminator = true

    [output]
    directory = out
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace

from .errors import ConfigurationError
from .grid import Grid1D, TAA_GRID, SURROGATE_MASS
from .heom import HeomConfig
from .units import beta_from_temperature, fs_to_au, wavenumber_to_hartree

__all__ = ["RunConfig", "parse_quantity", "load_config", "validate"]

# Default Drude cutoff: never stated alongside the model it belongs to, so
# a conventional solvent value (about 500 cm^-1) is shipped and flagged
# "assumed" in every output summary.
DEFAULT_OMEGA_C = 2.28e-3

SCENARIOS = ("relax-ground", "relax-excited", "wavepacket", "steady-compare", "sweep")
METHODS = ("redfield", "ccqme", "heom")

_ENERGY_UNITS = {"hartree": 1.0, "cm-1": None}
_TIME_UNITS = {"au": 1.0, "fs": None}


def parse_quantity(text: str, kind: str) -> float:
    """Parse "<number> <unit>" into atomic units for the given kind."""
    parts = text.split()
    if len(parts) != 2:
        raise ConfigurationError(
            f"expected '<number> <unit>' for a {kind} quantity, got {text!r}"
        )
    try:
        value = float(parts[0])
    except ValueError as exc:
        raise ConfigurationError(f"bad number in {text!r}") from exc
    unit = parts[1].lower()
    if kind == "energy":
        if unit == "hartree":
            return value
        if unit == "cm-1":
            return wavenumber_to_hartree(value)
        raise ConfigurationError(f"energy unit must be hartree or cm-1, got {unit!r}")
    if kind == "time":
        if unit == "au":
            return value
        if unit == "fs":
            return fs_to_au(value)
        raise ConfigurationError(f"time unit must be fs or au, got {unit!r}")
    if kind == "temperature":
        if unit == "kelvin":
            return value
        raise ConfigurationError(f"temperature unit must be kelvin, got {unit!r}")
    if kind == "length":
        if unit == "bohr":
            return value
        raise ConfigurationError(f"length unit must be bohr, got {unit!r}")
    raise ValueError(f"unknown quantity kind {kind!r}")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters, atomic units throughout."""

    # system
    system_source: str = "builtin"  # builtin | file | dvr
    system_name: str = "taa6"
    system_file: str | None = None
    potential: str = "surrogate-taa"
    grid: Grid1D = TAA_GRID
    mass: float = SURROGATE_MASS
    n_levels: int = 6
    # bath
    gammas: tuple[float, ...] = (0.1,)
    omega_c: float = DEFAULT_OMEGA_C
    omega_c_provenance: str = "assumed"
    temperature: float = 300.0
    n_matsubara: int = 1000
    # run
    scenario: str = "relax-ground"
    methods: tuple[str, ...] = ("redfield", "ccqme")
    secular: bool = True
    # propagation
    t_max: float = fs_to_au(2500.0)
    dt: float = 1.0
    stride: int = 50
    # hierarchy
    heom: HeomConfig = field(default_factory=HeomConfig)
    # wavepacket
    wp_center: float | None = None
    wp_width: float = 0.5
    wp_mass: float | None = None
    wp_mass_provenance: str = "assumed"
    # output
    out_dir: str = "out"

    @property
    def beta(self) -> float:
        return beta_from_temperature(self.temperature)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ConfigurationError(f"expected a boolean, got {text!r}")


def load_config(path) -> RunConfig:
    """Read an INI config file into a RunConfig (defaults filled in)."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path!r}")
    cfg = RunConfig()
    updates: dict = {}

    if parser.has_section("system"):
        sec = parser["system"]
        updates["system_source"] = sec.get("source", cfg.system_source).strip()
        updates["system_name"] = sec.get("name", cfg.system_name).strip()
        if "file" in sec:
            updates["system_file"] = sec["file"].strip()
        updates["potential"] = sec.get("potential", cfg.potential).strip()
        if "q_min" in sec or "q_max" in sec or "n_points" in sec:
            updates["grid"] = Grid1D(
                q_min=parse_quantity(sec.get("q_min", "-1.5 bohr"), "length"),
                q_max=parse_quantity(sec.get("q_max", "2.1 bohr"), "length"),
                n_points=sec.getint("n_points", TAA_GRID.n_points),
            )
        if "mass" in sec:
            updates["mass"] = sec.getfloat("mass")
        if "n_levels" in sec:
            updates["n_levels"] = sec.getint("n_levels")

    if parser.has_section("bath"):
        sec = parser["bath"]
        if "gamma" in sec:
            updates["gammas"] = tuple(
                float(v) for v in sec["gamma"].replace(",", " ").split()
            )
        if "omega_c" in sec:
            updates["omega_c"] = parse_quantity(sec["omega_c"], "energy")
            updates["omega_c_provenance"] = "user"
        if "temperature" in sec:
            updates["temperature"] = parse_quantity(sec["temperature"], "temperature")
        if "n_matsubara" in sec:
            updates["n_matsubara"] = sec.getint("n_matsubara")

    if parser.has_section("run"):
        sec = parser["run"]
        updates["scenario"] = sec.get("scenario", cfg.scenario).strip()
        if "methods" in sec:
            updates["methods"] = tuple(
                m.strip() for m in sec["methods"].split(",") if m.strip()
            )
        if "secular" in sec:
            updates["secular"] = _parse_bool(sec["secular"])

    if parser.has_section("propagation"):
        sec = parser["propagation"]
        if "t_max" in sec:
            updates["t_max"] = parse_quantity(sec["t_max"], "time")
        if "dt" in sec:
            updates["dt"] = parse_quantity(sec["dt"], "time")
        if "stride" in sec:
            updates["stride"] = sec.getint("stride")

    if parser.has_section("heom"):
        sec = parser["heom"]
        updates["heom"] = HeomConfig(
            depth=sec.getint("depth", 5),
            n_exponentials=sec.getint("n_exponentials", 3),
            terminator=_parse_bool(sec.get("terminator", "true")),
        )

    if parser.has_section("wavepacket"):
        sec = parser["wavepacket"]
        if "center" in sec:
            updates["wp_center"] = parse_quantity(sec["center"], "length")
        if "width" in sec:
            updates["wp_width"] = parse_quantity(sec["width"], "length")
        if "mass" in sec:
            updates["wp_mass"] = sec.getfloat("mass")
            updates["wp_mass_provenance"] = "user"

    if parser.has_section("output"):
        sec = parser["output"]
        if "directory" in sec:
            updates["out_dir"] = sec["directory"].strip()

    return replace(cfg, **updates)


def validate(cfg: RunConfig) -> list[str]:
    """All configuration problems at once; empty list means runnable."""
    problems: list[str] = []
    if cfg.system_source not in ("builtin", "file", "dvr"):
        problems.append(f"system source must be builtin|file|dvr, got {cfg.system_source!r}")
    if cfg.system_source == "builtin" and cfg.system_name != "taa6":
        problems.append(f"unknown builtin system {cfg.system_name!r} (only 'taa6')")
    if cfg.system_source == "file" and not cfg.system_file:
        problems.append("system source 'file' needs system.file")
    if not cfg.gammas:
        problems.append("bath.gamma list is empty")
    for g in cfg.gammas:
        if g < 0:
            problems.append(f"gamma must be >= 0, got {g}")
    if cfg.omega_c <= 0:
        problems.append(f"omega_c must be positive, got {cfg.omega_c}")
    if cfg.temperature <= 0:
        problems.append(f"temperature must be positive, got {cfg.temperature} K (beta diverges)")
    else:
        x = cfg.beta * cfg.omega_c / (6.283185307179586)
        if abs(x - round(x)) < 1e-9 * max(1.0, round(x)) and round(x) >= 1:
            problems.append(
                "beta*omega_c collides with a Matsubara frequency (2*pi*k); "
                "shift omega_c or the temperature"
            )
    if cfg.n_matsubara < 1:
        problems.append(f"n_matsubara must be >= 1, got {cfg.n_matsubara}")
    if cfg.scenario not in SCENARIOS:
        problems.append(f"scenario must be one of {SCENARIOS}, got {cfg.scenario!r}")
    if not cfg.methods:
        problems.append("run.methods is empty; pick from " + ", ".join(METHODS))
    for m in cfg.methods:
        if m not in METHODS:
            problems.append(f"unknown method {m!r}; pick from " + ", ".join(METHODS))
    if cfg.dt <= 0:
        problems.append(f"dt must be positive, got {cfg.dt}")
    if cfg.t_max < cfg.dt:
        problems.append(f"t_max = {cfg.t_max} a.u. is shorter than one step")
    if cfg.stride < 1:
        problems.append(f"stride must be >= 1, got {cfg.stride}")
    if cfg.n_levels < 1:
        problems.append(f"n_levels must be >= 1, got {cfg.n_levels}")
    if cfg.scenario == "wavepacket":
        if cfg.system_source != "dvr":
            problems.append("wavepacket scenario needs system source 'dvr'")
        if cfg.n_levels < 12:
            problems.append(
                f"wavepacket scenario needs n_levels >= 12, got {cfg.n_levels}"
            )
        if cfg.wp_center is None and cfg.potential != "surrogate-taa":
            problems.append(
                "wavepacket.center is required unless the potential is surrogate-taa"
            )
    if cfg.scenario == "sweep" and "heom" not in cfg.methods:
        problems.append("sweep scenario needs the heom method as the error reference")
    if cfg.heom.depth < 1:
        problems.append(f"heom depth must be >= 1, got {cfg.heom.depth}")
    if cfg.heom.n_exponentials < 1:
        problems.append(
            f"heom n_exponentials must be >= 1, got {cfg.heom.n_exponentials}"
        )
    return problems
