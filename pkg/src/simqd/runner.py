"""Scenario orchestration: kernel, dynamics and sweep runs.

Workers (bounded by the SIMQD_THREADS environment variable) evaluate the
scenario points; the main thread performs every file write, so each
output file has a single writer.  All numeric CSV columns are printed
with 17 significant digits and LF line endings, which makes reruns of
the same config byte-identical.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, config_digest, serialize_config
from .errors import ConfigError
from .kernel import (
    DephasingKernel,
    cutoff_frequency,
    dephasing_integrand,
    polaron_shift_rate,
    tabulate_kernel,
)
from .material import ThermalEnv
from .dynamics import CouplingRates, DynamicsResult, PulseSpec, SimGrid, simulate

_INTEGRAND_POINTS = 2000


def _pool_size() -> int:
    raw = os.environ.get("SIMQD_THREADS")
    if raw is not None:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ConfigError(f"SIMQD_THREADS: expected an integer, got {raw!r}") from exc
        if n < 1:
            raise ConfigError("SIMQD_THREADS: must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)


def _map_pool(fn, items: list):
    """Evaluate fn over items on the worker pool, preserving order."""
    if len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=_pool_size()) as pool:
        return list(pool.map(fn, items))


def _fmt(x: float) -> str:
    return f"{x:.16e}"


def _write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    rows = zip(*columns)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _label(x: float) -> str:
    return f"{x:g}"


def _out_dir(cfg: ScenarioConfig, out) -> Path:
    target = out if out is not None else cfg.out
    if target is None:
        raise ConfigError("out: no output directory given (config \"out\" or --out)")
    path = Path(target)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _tabulate(cfg: ScenarioConfig, temperature: float) -> DephasingKernel:
    return tabulate_kernel(
        cfg.material,
        ThermalEnv(temperature),
        t_max=cfg.kernel_t_max,
        n_points=cfg.kernel_points,
        quad=cfg.quadrature,
    )


def _kernels_by_temperature(cfg: ScenarioConfig) -> dict[float, DephasingKernel | None]:
    if not cfg.include_dephasing:
        return {T: None for T in cfg.temperatures}
    tables = _map_pool(lambda T: _tabulate(cfg, T), list(cfg.temperatures))
    return dict(zip(cfg.temperatures, tables))


def _grid_for(cfg: ScenarioConfig, pulse: PulseSpec, rates: CouplingRates) -> SimGrid:
    if cfg.grid_n_steps is not None:
        t_end = cfg.grid_t_end
        if t_end is None:
            t_end = pulse.arrival_time + max(4.0 * pulse.duration, 2.0e-11)
        return SimGrid(pulse.start_time, t_end, cfg.grid_n_steps)
    return SimGrid.for_scenario(pulse, rates, t_end=cfg.grid_t_end, refine=cfg.grid_refine)


def run_kernel(cfg: ScenarioConfig, out=None) -> dict:
    """Tabulate the dephasing exponent per temperature and dump artifacts.

    Writes kernel_T<K>.csv (columns t_s, re_gamma, im_gamma), an
    integrand dump integrand_T<K>.csv (columns omega_rad_s,
    re_integrand) and kernel_summary.json.  Returns the summary dict.
    """
    out_path = _out_dir(cfg, out)
    temps = list(cfg.temperatures)
    tables = _map_pool(lambda T: _tabulate(cfg, T), temps)

    lo = 0.0
    hi = 2.0 * cfg.material.cutoff_scale
    omega = np.linspace(lo, hi, _INTEGRAND_POINTS + 1)[1:]

    summary: dict = {
        "command": "kernel",
        "config": serialize_config(cfg),
        "config_digest": config_digest(cfg),
        "shift_rate_per_s": polaron_shift_rate(cfg.material, quad=cfg.quadrature),
        "per_temperature": {},
    }
    for T, kern in zip(temps, tables):
        label = _label(T)
        kcsv = f"kernel_T{label}K.csv"
        icsv = f"integrand_T{label}K.csv"
        _write_csv(out_path / kcsv, ["t_s", "re_gamma", "im_gamma"],
                   [kern.times, kern.values.real, kern.values.imag])
        env = ThermalEnv(T)
        _write_csv(out_path / icsv, ["omega_rad_s", "re_integrand"],
                   [omega, dephasing_integrand(omega, cfg.material, env)])
        summary["per_temperature"][label] = {
            "temperature_K": T,
            "kernel_csv": kcsv,
            "integrand_csv": icsv,
            "plateau_re": kern.plateau_re,
            "cutoff_rad_s": cutoff_frequency(cfg.material, env),
            "quadrature_error": kern.error_estimate,
            "t_max_s": kern.t_max,
            "n_points": int(kern.times.size),
        }
    _write_json(out_path / "kernel_summary.json", summary)
    return summary


def _dynamics_name(T: float, d: float) -> str:
    return f"dynamics_T{_label(T)}K_d{_label(d)}s.csv"


def _series_columns(res: DynamicsResult) -> list[np.ndarray]:
    amp = res.excited_amplitude
    return [res.times, amp.real, amp.imag, np.abs(amp), res.population]


_SERIES_HEADER = ["time_s", "re_sigma", "im_sigma", "abs_sigma", "p_excited"]


def run_dynamics(cfg: ScenarioConfig, out=None) -> dict:
    """Simulate every (temperature, duration) pair plus kernel-off references.

    Writes one time-series CSV per pair (columns time_s, re_sigma,
    im_sigma, abs_sigma, p_excited; amplitude per unit pulse amplitude,
    population per squared amplitude), one reference_d<s>.csv per
    duration with the dephasing turned off, and dynamics_summary.json
    with max_p_excited per scenario.  Returns the summary dict.
    """
    out_path = _out_dir(cfg, out)
    rates = CouplingRates(cfg.gamma_cavity, cfg.gamma_background)
    kernels = _kernels_by_temperature(cfg)

    points = [(T, d) for T in cfg.temperatures for d in cfg.durations]

    def _one(point):
        T, d = point
        pulse = PulseSpec(duration=d, epsilon=cfg.epsilon)
        return simulate(pulse, rates, kernels[T], _grid_for(cfg, pulse, rates))

    def _one_reference(d):
        pulse = PulseSpec(duration=d, epsilon=cfg.epsilon)
        return simulate(pulse, rates, None, _grid_for(cfg, pulse, rates))

    results = _map_pool(_one, points)
    references = _map_pool(_one_reference, list(cfg.durations))

    summary: dict = {
        "command": "dynamics",
        "config": serialize_config(cfg),
        "config_digest": config_digest(cfg),
        "scenarios": [],
        "references": [],
    }
    for (T, d), res in zip(points, results):
        name = _dynamics_name(T, d)
        _write_csv(out_path / name, _SERIES_HEADER, _series_columns(res))
        summary["scenarios"].append({
            "temperature_K": T,
            "duration_s": d,
            "csv": name,
            "max_p_excited": res.max_population,
            "peak_time_s": res.peak_time,
            "dephasing": cfg.include_dephasing,
            "n_steps": int(res.diagnostics["n_steps"]),
            "dt_s": float(res.diagnostics["dt"]),
        })
    for d, res in zip(cfg.durations, references):
        name = f"reference_d{_label(d)}s.csv"
        _write_csv(out_path / name, _SERIES_HEADER, _series_columns(res))
        summary["references"].append({
            "duration_s": d,
            "csv": name,
            "max_p_excited": res.max_population,
        })
    _write_json(out_path / "dynamics_summary.json", summary)
    return summary


@dataclass(frozen=True)
class EfficiencyMap:
    """Transfer efficiency along one swept coordinate.

    ``axis_values`` are the swept coordinate (strictly increasing),
    ``values`` the max-over-time excited population at each point and
    ``argmax_durations`` the pulse duration behind each value.
    ``config_digest`` ties the map back to the producing config.
    """

    axis: str
    axis_values: tuple[float, ...]
    values: tuple[float, ...]
    argmax_durations: tuple[float, ...]
    config_digest: str
    diagnostics: tuple[dict, ...] = field(default_factory=tuple)

    def __post_init__(self):
        n = len(self.axis_values)
        if n == 0 or len(self.values) != n or len(self.argmax_durations) != n:
            raise ConfigError("efficiency map needs matching, non-empty columns")
        if any(not 0.0 <= v <= 1.0 for v in self.values):
            raise ValueError("efficiencies must lie in [0, 1]")
        if any(b <= a for a, b in zip(self.axis_values, self.axis_values[1:])):
            raise ConfigError("sweep axis must be strictly increasing")


_AXIS_COLUMN = {
    "duration": "duration_s",
    "temperature": "temperature_K",
    "rate_ratio": "rate_ratio",
}


def _sweep_points(cfg: ScenarioConfig, axis: str) -> list[tuple[float, float, float, CouplingRates]]:
    """(axis value, temperature, duration, rates) per sweep point."""
    base = CouplingRates(cfg.gamma_cavity, cfg.gamma_background)
    if axis == "duration":
        if len(cfg.temperatures) != 1:
            raise ConfigError("temperatures: duration sweep needs exactly one temperature")
        T = cfg.temperatures[0]
        return [(d, T, d, base) for d in cfg.durations]
    if axis == "temperature":
        if len(cfg.durations) != 1:
            raise ConfigError("durations: temperature sweep needs exactly one duration")
        d = cfg.durations[0]
        return [(T, T, d, base) for T in cfg.temperatures]
    if axis == "rate_ratio":
        if len(cfg.temperatures) != 1 or len(cfg.durations) != 1:
            raise ConfigError("sweep.ratios: rate_ratio sweep needs one temperature and one duration")
        if not cfg.sweep.ratios:
            raise ConfigError("sweep.ratios: required for the rate_ratio axis")
        T, d = cfg.temperatures[0], cfg.durations[0]
        return [
            (r, T, d, CouplingRates(cfg.gamma_cavity, r * cfg.gamma_cavity))
            for r in cfg.sweep.ratios
        ]
    raise ConfigError("sweep.axis: expected duration, temperature or rate_ratio")


def run_sweep(cfg: ScenarioConfig, out=None, axis: str | None = None) -> dict:
    """Sweep max_t P(t) along one coordinate and write the efficiency map.

    Writes sweep_<axis>.csv (axis column, efficiency, argmax_duration_s,
    peak_time_s) and sweep_<axis>.json including per-point diagnostics.
    Returns the summary dict.
    """
    axis = axis or cfg.sweep.axis
    out_path = _out_dir(cfg, out)
    points = _sweep_points(cfg, axis)

    kernels = _kernels_by_temperature(cfg)

    def _one(point):
        _, T, d, rates = point
        pulse = PulseSpec(duration=d, epsilon=cfg.epsilon)
        return simulate(pulse, rates, kernels[T], _grid_for(cfg, pulse, rates))

    results = _map_pool(_one, points)

    diags = tuple(
        {
            "temperature_K": T,
            "duration_s": d,
            "gamma_cavity": rates.gamma_cavity,
            "gamma_background": rates.gamma_background,
            "peak_time_s": res.peak_time,
            "n_steps": int(res.diagnostics["n_steps"]),
            "dt_s": float(res.diagnostics["dt"]),
            "dephasing": cfg.include_dephasing,
        }
        for (_, T, d, rates), res in zip(points, results)
    )
    emap = EfficiencyMap(
        axis=axis,
        axis_values=tuple(p[0] for p in points),
        values=tuple(r.max_population for r in results),
        argmax_durations=tuple(p[2] for p in points),
        config_digest=config_digest(cfg),
        diagnostics=diags,
    )

    column = _AXIS_COLUMN[axis]
    _write_csv(
        out_path / f"sweep_{axis}.csv",
        [column, "efficiency", "argmax_duration_s", "peak_time_s"],
        [
            np.asarray(emap.axis_values),
            np.asarray(emap.values),
            np.asarray(emap.argmax_durations),
            np.asarray([d["peak_time_s"] for d in emap.diagnostics]),
        ],
    )
    summary = {
        "command": "sweep",
        "axis": axis,
        "axis_values": list(emap.axis_values),
        "values": list(emap.values),
        "argmax_durations": list(emap.argmax_durations),
        "config": serialize_config(cfg),
        "config_digest": emap.config_digest,
        "diagnostics": list(emap.diagnostics),
        "csv": f"sweep_{axis}.csv",
    }
    _write_json(out_path / f"sweep_{axis}.json", summary)
    return summary
