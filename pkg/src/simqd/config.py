"""Scenario configuration: JSON with unit-tagged strings.

Every dimensional value carries an explicit unit tag ("1GHz", "0.5ns",
"7.0eV"); temperatures may be bare numbers, which mean kelvin.  Parsing
converts everything to SI (seconds, 1/s rate constants, joules, meters,
kelvin) and reports failures with the dotted path of the offending
field, e.g. "temperatures[0]" or "rates.G1".

A parsed ``ScenarioConfig`` can be serialized back to canonical JSON;
``parse -> serialize`` is idempotent and the sha256 of the canonical
form is used as the provenance digest in all output artifacts.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .material import MATERIAL_PROFILES, MaterialParams
from .quadrature import QuadratureSpec

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(.*?)\s*$")

_TIME_UNITS = {
    "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9, "ps": 1e-12, "fs": 1e-15,
}
# Rate tags are read as the decay constants that appear in exp(-rate*t);
# no 2*pi is applied anywhere.
_RATE_UNITS = {
    "Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9, "THz": 1e12,
    "1/s": 1.0, "/s": 1.0, "rad/s": 1.0,
}
_ENERGY_UNITS = {"J": 1.0, "eV": 1.602176634e-19, "meV": 1.602176634e-22}
_LENGTH_UNITS = {"m": 1.0, "um": 1e-6, "nm": 1e-9, "pm": 1e-12}
_DENSITY_UNITS = {"kg/m3": 1.0, "kg/m^3": 1.0, "g/cm3": 1e3, "g/cm^3": 1e3}
_VELOCITY_UNITS = {"m/s": 1.0, "km/s": 1e3}
_TEMPERATURE_UNITS = {"K": 1.0, "": 1.0}
_DIMENSIONLESS_UNITS = {"": 1.0}

_UNIT_TABLES = {
    "time": _TIME_UNITS,
    "rate": _RATE_UNITS,
    "energy": _ENERGY_UNITS,
    "length": _LENGTH_UNITS,
    "density": _DENSITY_UNITS,
    "velocity": _VELOCITY_UNITS,
    "temperature": _TEMPERATURE_UNITS,
    "dimensionless": _DIMENSIONLESS_UNITS,
}


def parse_quantity(value, kind: str, path: str) -> float:
    """Convert a tagged string (or bare number where allowed) to SI."""
    table = _UNIT_TABLES[kind]
    if isinstance(value, bool):
        raise ConfigError(f"{path}: expected a quantity, got a boolean")
    if isinstance(value, (int, float)):
        if "" in table:
            return float(value)
        raise ConfigError(f"{path}: unit tag is mandatory (e.g. \"1{next(iter(table))}\")")
    if not isinstance(value, str):
        raise ConfigError(f"{path}: expected a unit-tagged string")
    m = _NUMBER.match(value)
    if not m:
        raise ConfigError(f"{path}: cannot parse quantity {value!r}")
    number, tag = m.groups()
    if tag not in table:
        known = ", ".join(sorted(t for t in table if t))
        raise ConfigError(f"{path}: unknown unit tag {tag!r} (expected one of: {known})")
    return float(number) * table[tag]


def _format_quantity(value: float, kind: str) -> str | float:
    if kind == "temperature":
        return value
    base = {"time": "s", "rate": "Hz", "energy": "J",
            "length": "m", "density": "kg/m3", "velocity": "m/s"}[kind]
    return f"{value:.17g}{base}"


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "duration"
    ratios: tuple[float, ...] = ()


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated scenario: material, thermal points, pulses and rates.

    All fields are SI.  ``profile`` records the named profile the
    material came from, or None when the constants were given
    explicitly.
    """

    material: MaterialParams
    temperatures: tuple[float, ...]
    durations: tuple[float, ...]
    gamma_cavity: float
    gamma_background: float
    profile: str | None = "GaAs-default"
    epsilon: float = 0.01
    include_dephasing: bool = True
    kernel_t_max: float = 4.0e-11
    kernel_points: int | None = None
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    grid_t_end: float | None = None
    grid_n_steps: int | None = None
    grid_refine: int = 1
    sweep: SweepSpec = field(default_factory=SweepSpec)
    out: str | None = None


def _require(mapping: dict, key: str, aliases: tuple[str, ...] = ()) -> tuple[str, object]:
    present = [name for name in (key, *aliases) if name in mapping]
    if len(present) > 1:
        raise ConfigError(f"{present[1]}: duplicate of {present[0]}")
    if not present:
        raise ConfigError(f"{key}: missing required field")
    return present[0], mapping[present[0]]


def _float_list(raw, kind: str, path: str) -> tuple[float, ...]:
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"{path}: expected a list")
    if len(raw) == 0:
        raise ConfigError(f"{path}: needs at least one entry")
    return tuple(parse_quantity(v, kind, f"{path}[{i}]") for i, v in enumerate(raw))


def _parse_material(data: dict) -> tuple[MaterialParams, str | None]:
    has_profile = "profile" in data
    has_explicit = "material" in data
    if has_profile and has_explicit:
        raise ConfigError("profile: give either a profile name or explicit material constants, not both")
    if has_profile:
        name = data["profile"]
        if name not in MATERIAL_PROFILES:
            known = ", ".join(sorted(MATERIAL_PROFILES))
            raise ConfigError(f"profile: unknown profile {name!r} (known: {known})")
        return MATERIAL_PROFILES[name], name
    if not has_explicit:
        raise ConfigError("profile: missing material (set \"profile\" or \"material\")")
    raw = data["material"]
    if not isinstance(raw, dict):
        raise ConfigError("material: expected an object")
    fields = {
        "mass_density": "density",
        "sound_velocity": "velocity",
        "deformation_potential_electron": "energy",
        "deformation_potential_hole": "energy",
        "localization_length": "length",
    }
    kwargs = {}
    for key, kind in fields.items():
        if key not in raw:
            raise ConfigError(f"material.{key}: missing required field")
        kwargs[key] = parse_quantity(raw[key], kind, f"material.{key}")
    extra = set(raw) - set(fields)
    if extra:
        raise ConfigError(f"material.{sorted(extra)[0]}: unknown field")
    try:
        return MaterialParams(**kwargs), None
    except ValueError as exc:
        raise ConfigError(f"material: {exc}") from exc


def _parse_rates(data: dict) -> tuple[float, float]:
    _, raw = _require(data, "rates")
    if not isinstance(raw, dict):
        raise ConfigError("rates: expected an object with G1/G2")
    vals = {}
    for short, long in (("G1", "gamma_cavity"), ("G2", "gamma_background")):
        if short in raw and long in raw:
            raise ConfigError(f"rates.{short}: duplicate of rates.{long}")
        if short in raw:
            vals[short] = parse_quantity(raw[short], "rate", f"rates.{short}")
        elif long in raw:
            vals[short] = parse_quantity(raw[long], "rate", f"rates.{long}")
        elif short == "G1":
            raise ConfigError("rates.G1: missing required field")
        else:
            vals[short] = 0.0
    for short in vals:
        if vals[short] < 0.0:
            raise ConfigError(f"rates.{short}: must be >= 0")
    extra = set(raw) - {"G1", "G2", "gamma_cavity", "gamma_background"}
    if extra:
        raise ConfigError(f"rates.{sorted(extra)[0]}: unknown field")
    return vals["G1"], vals["G2"]


def _parse_quadrature(raw, path: str = "quadrature") -> QuadratureSpec:
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    spec = QuadratureSpec()
    known = {"rel_tolerance": float, "max_refinements": int,
             "nodes_per_panel": int, "panels_per_period": int}
    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            raise ConfigError(f"{path}.{key}: unknown field")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path}.{key}: expected a number")
        kwargs[key] = known[key](value)
    try:
        return replace(spec, **kwargs)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


_TOP_LEVEL_KEYS = {
    "profile", "material", "T", "temperatures", "d", "durations", "rates",
    "epsilon", "include_dephasing", "kernel", "quadrature", "grid",
    "sweep", "out",
}


def parse_config_data(data: dict) -> ScenarioConfig:
    """Validate a decoded JSON object and apply defaults."""
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be a JSON object")
    unknown = set(data) - _TOP_LEVEL_KEYS
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown field")

    material, profile = _parse_material(data)

    _, t_raw = _require(data, "temperatures", aliases=("T",))
    temperatures = _float_list(t_raw, "temperature", "temperatures")
    for i, T in enumerate(temperatures):
        if T < 0.0:
            raise ConfigError(f"temperatures[{i}]: must be >= 0 K")

    _, d_raw = _require(data, "durations", aliases=("d",))
    durations = _float_list(d_raw, "time", "durations")
    for i, d in enumerate(durations):
        if d <= 0.0:
            raise ConfigError(f"durations[{i}]: must be positive")

    g1, g2 = _parse_rates(data)
    if g1 + g2 <= 0.0:
        raise ConfigError("rates: at least one rate must be positive")

    epsilon = data.get("epsilon", 0.01)
    if isinstance(epsilon, bool) or not isinstance(epsilon, (int, float)):
        raise ConfigError("epsilon: expected a number")

    include = data.get("include_dephasing", True)
    if not isinstance(include, bool):
        raise ConfigError("include_dephasing: expected true or false")

    kernel_t_max = 4.0e-11
    kernel_points = None
    if "kernel" in data:
        raw = data["kernel"]
        if not isinstance(raw, dict):
            raise ConfigError("kernel: expected an object")
        extra = set(raw) - {"t_max", "n_points"}
        if extra:
            raise ConfigError(f"kernel.{sorted(extra)[0]}: unknown field")
        if "t_max" in raw:
            kernel_t_max = parse_quantity(raw["t_max"], "time", "kernel.t_max")
            if kernel_t_max <= 0.0:
                raise ConfigError("kernel.t_max: must be positive")
        if "n_points" in raw:
            n = raw["n_points"]
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ConfigError("kernel.n_points: expected an integer >= 2")
            kernel_points = n

    quad = _parse_quadrature(data["quadrature"]) if "quadrature" in data else QuadratureSpec()

    grid_t_end = None
    grid_n_steps = None
    grid_refine = 1
    if "grid" in data:
        raw = data["grid"]
        if not isinstance(raw, dict):
            raise ConfigError("grid: expected an object")
        extra = set(raw) - {"t_end", "n_steps", "refine"}
        if extra:
            raise ConfigError(f"grid.{sorted(extra)[0]}: unknown field")
        if "t_end" in raw:
            grid_t_end = parse_quantity(raw["t_end"], "time", "grid.t_end")
        if "n_steps" in raw:
            n = raw["n_steps"]
            if isinstance(n, bool) or not isinstance(n, int) or n < 2:
                raise ConfigError("grid.n_steps: expected an integer >= 2")
            grid_n_steps = n
        if "refine" in raw:
            r = raw["refine"]
            if isinstance(r, bool) or not isinstance(r, int) or r < 1:
                raise ConfigError("grid.refine: expected an integer >= 1")
            grid_refine = r

    sweep = SweepSpec()
    if "sweep" in data:
        raw = data["sweep"]
        if not isinstance(raw, dict):
            raise ConfigError("sweep: expected an object")
        extra = set(raw) - {"axis", "ratios"}
        if extra:
            raise ConfigError(f"sweep.{sorted(extra)[0]}: unknown field")
        axis = raw.get("axis", "duration")
        if axis not in ("duration", "temperature", "rate_ratio"):
            raise ConfigError("sweep.axis: expected duration, temperature or rate_ratio")
        ratios = ()
        if "ratios" in raw:
            ratios = _float_list(raw["ratios"], "dimensionless", "sweep.ratios")
        if axis == "rate_ratio" and not ratios:
            raise ConfigError("sweep.ratios: required for the rate_ratio axis")
        sweep = SweepSpec(axis=axis, ratios=ratios)

    out = data.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("out: expected a path string")

    return ScenarioConfig(
        material=material,
        temperatures=temperatures,
        durations=durations,
        gamma_cavity=g1,
        gamma_background=g2,
        profile=profile,
        epsilon=float(epsilon),
        include_dephasing=include,
        kernel_t_max=kernel_t_max,
        kernel_points=kernel_points,
        quadrature=quad,
        grid_t_end=grid_t_end,
        grid_n_steps=grid_n_steps,
        grid_refine=grid_refine,
        sweep=sweep,
        out=out,
    )


def parse_config(path) -> ScenarioConfig:
    """Load and validate a JSON config file.

    Raises ConfigError with the dotted path of the offending field on
    any validation failure.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config: file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config: invalid JSON: {exc}") from exc
    return parse_config_data(data)


def serialize_config(cfg: ScenarioConfig) -> dict:
    """Canonical JSON form; parse(serialize(cfg)) == cfg."""
    data: dict = {}
    if cfg.profile is not None:
        data["profile"] = cfg.profile
    else:
        m = cfg.material
        data["material"] = {
            "mass_density": _format_quantity(m.mass_density, "density"),
            "sound_velocity": _format_quantity(m.sound_velocity, "velocity"),
            "deformation_potential_electron": _format_quantity(
                m.deformation_potential_electron, "energy"),
            "deformation_potential_hole": _format_quantity(
                m.deformation_potential_hole, "energy"),
            "localization_length": _format_quantity(m.localization_length, "length"),
        }
    data["temperatures"] = list(cfg.temperatures)
    data["durations"] = [_format_quantity(d, "time") for d in cfg.durations]
    data["rates"] = {
        "G1": _format_quantity(cfg.gamma_cavity, "rate"),
        "G2": _format_quantity(cfg.gamma_background, "rate"),
    }
    data["epsilon"] = cfg.epsilon
    data["include_dephasing"] = cfg.include_dephasing
    kernel: dict = {"t_max": _format_quantity(cfg.kernel_t_max, "time")}
    if cfg.kernel_points is not None:
        kernel["n_points"] = cfg.kernel_points
    data["kernel"] = kernel
    q = cfg.quadrature
    data["quadrature"] = {
        "rel_tolerance": q.rel_tolerance,
        "max_refinements": q.max_refinements,
        "nodes_per_panel": q.nodes_per_panel,
        "panels_per_period": q.panels_per_period,
    }
    grid: dict = {}
    if cfg.grid_t_end is not None:
        grid["t_end"] = _format_quantity(cfg.grid_t_end, "time")
    if cfg.grid_n_steps is not None:
        grid["n_steps"] = cfg.grid_n_steps
    if cfg.grid_refine != 1:
        grid["refine"] = cfg.grid_refine
    if grid:
        data["grid"] = grid
    sweep: dict = {"axis": cfg.sweep.axis}
    if cfg.sweep.ratios:
        sweep["ratios"] = list(cfg.sweep.ratios)
    data["sweep"] = sweep
    if cfg.out is not None:
        data["out"] = cfg.out
    return data


def config_digest(cfg: ScenarioConfig) -> str:
    """sha256 of the canonical serialization; the provenance hash."""
    canon = serialize_config(cfg)
    canon.pop("out", None)
    blob = json.dumps(canon, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
