import json
import re
import subprocess
import sys

import numpy as np
import pytest

from simqd.cli import main
from simqd.config import (
    config_digest,
    parse_config,
    parse_config_data,
    parse_quantity,
    serialize_config,
)
from simqd.errors import ConfigError
from simqd.material import GAAS_DEFAULT
from simqd.runner import EfficiencyMap, _pool_size, run_dynamics, run_kernel, run_sweep

_FLOAT_16E = re.compile(r"^-?\d\.\d{16}e[-+]\d{2,3}$")


def base_config(**over):
    data = {
        "profile": "GaAs-default",
        "T": [4.0],
        "d": ["1ps"],
        "rates": {"G1": "1GHz"},
    }
    data.update(over)
    return data


def test_parse_minimal_defaults():
    cfg = parse_config_data(base_config())
    assert cfg.material == GAAS_DEFAULT
    assert cfg.profile == "GaAs-default"
    assert cfg.temperatures == (4.0,)
    assert cfg.durations == (1e-12,)
    assert cfg.gamma_cavity == 1e9
    assert cfg.gamma_background == 0.0
    assert cfg.epsilon == 0.01
    assert cfg.include_dephasing is True
    assert cfg.kernel_t_max == 4.0e-11
    assert cfg.kernel_points is None
    assert cfg.sweep.axis == "duration"
    assert cfg.out is None


@pytest.mark.parametrize(
    "value,kind,want",
    [
        ("0.5ns", "time", 5e-10),
        ("1ps", "time", 1e-12),
        ("2.5THz", "rate", 2.5e12),
        ("1GHz", "rate", 1e9),
        ("3e8 /s", "rate", 3e8),
        ("7.0eV", "energy", 7.0 * 1.602176634e-19),
        ("5nm", "length", 5e-9),
        ("5370 kg/m3", "density", 5370.0),
        ("5.11 km/s", "velocity", 5110.0),
        ("4K", "temperature", 4.0),
        (4, "temperature", 4.0),
        (0.3, "dimensionless", 0.3),
    ],
)
def test_parse_quantity(value, kind, want):
    assert parse_quantity(value, kind, "x") == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d.pop("rates"), "rates"),
        (lambda d: d.pop("T"), "temperatures"),
        (lambda d: d.update(temperatures=[4.0]), "duplicate"),
        (lambda d: d.update(d=["5parsecs"]), "durations[0]"),
        (lambda d: d.update(T=[-1.0]), "temperatures[0]"),
        (lambda d: d.update(T=[4.0, "cold"]), "temperatures[1]"),
        (lambda d: d.update(bogus=1), "bogus"),
        (lambda d: d["rates"].update(gamma_cavity="1GHz"), "duplicate"),
        (lambda d: d["rates"].update(G1="-1GHz"), "rates.G1"),
        (lambda d: d.update(rates={"G2": "1GHz"}), "rates.G1"),
        (lambda d: d.update(rates={"G1": 0, "G2": 0}), "rates"),
        (lambda d: d.update(profile="diamond"), "profile"),
        (lambda d: d.update(epsilon=True), "epsilon"),
        (lambda d: d.update(include_dephasing="yes"), "include_dephasing"),
        (lambda d: d.update(sweep={"axis": "phase"}), "sweep.axis"),
        (lambda d: d.update(sweep={"axis": "rate_ratio"}), "sweep.ratios"),
        (lambda d: d.update(grid={"n_steps": 1}), "grid.n_steps"),
        (lambda d: d.update(grid={"dt": "1ps"}), "grid.dt"),
        (lambda d: d.update(kernel={"cutoff": 1}), "kernel.cutoff"),
        (lambda d: d.update(kernel={"t_max": "-1ps"}), "kernel.t_max"),
        (lambda d: d.update(quadrature={"rel_tolerance": "tight"}), "quadrature"),
        (lambda d: d.update(d="1ps"), "durations"),
        (lambda d: d.update(d=[]), "durations"),
        (lambda d: d.update(out=7), "out"),
    ],
)
def test_parse_errors_name_the_field(mutate, needle):
    data = base_config()
    mutate(data)
    with pytest.raises(ConfigError, match=re.escape(needle)):
        parse_config_data(data)


def test_explicit_material_matches_profile():
    data = base_config()
    del data["profile"]
    data["material"] = {
        "mass_density": "5370 kg/m3",
        "sound_velocity": "5110 m/s",
        "deformation_potential_electron": "7.0eV",
        "deformation_potential_hole": "-3.5eV",
        "localization_length": "5nm",
    }
    cfg = parse_config_data(data)
    assert cfg.profile is None
    assert cfg.material == GAAS_DEFAULT


def test_profile_and_material_conflict():
    data = base_config()
    data["material"] = {"mass_density": "5370 kg/m3"}
    with pytest.raises(ConfigError, match="profile"):
        parse_config_data(data)


def test_round_trip_idempotent():
    data = base_config(
        T=[0.4, 4.0, 40.0],
        d=["1ps", "0.5ns"],
        rates={"G1": "1GHz", "G2": "0.3GHz"},
        epsilon=0.05,
        include_dephasing=False,
        kernel={"t_max": "20ps", "n_points": 801},
        quadrature={"rel_tolerance": 1e-9},
        grid={"refine": 2},
        sweep={"axis": "rate_ratio", "ratios": [0.0, 0.5, 1.0]},
        out="results",
    )
    # the sweep needs one T and one d, but parsing does not: validation
    # of the combination happens at run time
    cfg = parse_config_data(data)
    canon = serialize_config(cfg)
    again = parse_config_data(canon)
    assert again == cfg
    assert serialize_config(again) == canon


def test_digest_stable_and_physics_sensitive():
    cfg = parse_config_data(base_config())
    with_out = parse_config_data(base_config(out="somewhere"))
    shuffled = parse_config_data(dict(reversed(list(base_config().items()))))
    assert config_digest(with_out) == config_digest(cfg)
    assert config_digest(shuffled) == config_digest(cfg)
    hot = parse_config_data(base_config(T=[40.0]))
    assert config_digest(hot) != config_digest(cfg)


def test_parse_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config(bad)


def _assert_series_csv(path):
    text = path.read_bytes().decode("ascii")
    assert "\r" not in text
    lines = text.splitlines()
    assert lines[0] == "time_s,re_sigma,im_sigma,abs_sigma,p_excited"
    for cell in lines[1].split(","):
        assert _FLOAT_16E.match(cell), cell
    return np.loadtxt(path, delimiter=",", skiprows=1)


def test_run_kernel_outputs(tmp_path):
    cfg = parse_config_data(base_config(T=[0.4, 4.0, 40.0], kernel={"t_max": "12ps"}))
    summary = run_kernel(cfg, out=tmp_path / "a")
    per_t = summary["per_temperature"]
    assert list(per_t) == ["0.4", "4", "40"]
    plateaus = [per_t[k]["plateau_re"] for k in ("0.4", "4", "40")]
    assert plateaus[0] < plateaus[1] < plateaus[2]
    for key in ("0.4", "4", "40"):
        kcsv = tmp_path / "a" / per_t[key]["kernel_csv"]
        icsv = tmp_path / "a" / per_t[key]["integrand_csv"]
        header = kcsv.read_text().splitlines()[0]
        assert header == "t_s,re_gamma,im_gamma"
        table = np.loadtxt(kcsv, delimiter=",", skiprows=1)
        assert table.shape == (per_t[key]["n_points"], 3)
        assert table[0, 1] == 0.0 and table[0, 2] == 0.0
        assert np.loadtxt(icsv, delimiter=",", skiprows=1).shape[0] == 2000
    # reruns of the same config are byte-identical
    run_kernel(cfg, out=tmp_path / "b")
    name = per_t["4"]["kernel_csv"]
    assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    assert (tmp_path / "a" / "kernel_summary.json").read_bytes() == (
        tmp_path / "b" / "kernel_summary.json"
    ).read_bytes()


def test_run_dynamics_outputs_kernel_off(tmp_path):
    cfg = parse_config_data(base_config(include_dephasing=False))
    summary = run_dynamics(cfg, out=tmp_path)
    scen = summary["scenarios"][0]
    assert scen["csv"] == "dynamics_T4K_d1e-12s.csv"
    table = _assert_series_csv(tmp_path / scen["csv"])
    assert np.max(table[:, 4]) == scen["max_p_excited"]
    assert np.all(np.abs(table[:, 3] ** 2 - table[:, 4]) < 1e-12)
    # with dephasing off the reference run is the same physics
    ref = summary["references"][0]
    assert ref["csv"] == "reference_d1e-12s.csv"
    ref_table = _assert_series_csv(tmp_path / ref["csv"])
    assert np.array_equal(table, ref_table)


def test_run_dynamics_with_dephasing(tmp_path):
    cfg = parse_config_data(base_config(kernel={"t_max": "12ps"}))
    summary = run_dynamics(cfg, out=tmp_path)
    scen = summary["scenarios"][0]
    ref = summary["references"][0]
    assert scen["dephasing"] is True
    assert scen["max_p_excited"] < ref["max_p_excited"]
    assert scen["n_steps"] >= 200
    assert 0.0 < scen["dt_s"] < 1e-13


def test_run_sweep_matches_dynamics(tmp_path):
    data = base_config(d=["0.5ns"], include_dephasing=False)
    cfg = parse_config_data(data)
    dyn = run_dynamics(cfg, out=tmp_path / "dyn")
    swp = run_sweep(cfg, out=tmp_path / "swp")
    assert swp["axis"] == "duration"
    assert swp["values"][0] == dyn["scenarios"][0]["max_p_excited"]
    assert swp["config_digest"] == dyn["config_digest"]
    csv = (tmp_path / "swp" / swp["csv"]).read_text()
    assert csv.splitlines()[0] == "duration_s,efficiency,argmax_duration_s,peak_time_s"
    payload = json.loads((tmp_path / "swp" / "sweep_duration.json").read_text())
    assert payload["values"] == swp["values"]


def test_run_sweep_axis_validation(tmp_path):
    decreasing = parse_config_data(
        base_config(d=["2ps", "1ps"], include_dephasing=False)
    )
    with pytest.raises(ConfigError, match="increasing"):
        run_sweep(decreasing, out=tmp_path)
    two_t = parse_config_data(
        base_config(T=[4.0, 40.0], include_dephasing=False)
    )
    with pytest.raises(ConfigError, match="one temperature"):
        run_sweep(two_t, out=tmp_path)
    two_d = parse_config_data(
        base_config(d=["1ps", "2ps"], include_dephasing=False)
    )
    with pytest.raises(ConfigError, match="one duration"):
        run_sweep(two_d, out=tmp_path, axis="temperature")


def test_rate_ratio_sweep(tmp_path):
    cfg = parse_config_data(
        base_config(
            d=["0.5ns"],
            include_dephasing=False,
            sweep={"axis": "rate_ratio", "ratios": [0.0, 1.0]},
        )
    )
    swp = run_sweep(cfg, out=tmp_path)
    assert swp["axis_values"] == [0.0, 1.0]
    # opening a background channel can only lose excitation
    assert swp["values"][1] < swp["values"][0]
    diag = swp["diagnostics"][1]
    assert diag["gamma_background"] == pytest.approx(cfg.gamma_cavity)


def test_efficiency_map_validation():
    good = dict(
        axis="duration",
        axis_values=(1e-12, 2e-12),
        values=(0.1, 0.2),
        argmax_durations=(1e-12, 2e-12),
        config_digest="x",
    )
    EfficiencyMap(**good)
    with pytest.raises(ValueError):
        EfficiencyMap(**{**good, "values": (0.1, 1.2)})
    with pytest.raises(ConfigError):
        EfficiencyMap(**{**good, "values": (0.1,)})
    with pytest.raises(ConfigError):
        EfficiencyMap(**{**good, "axis_values": (2e-12, 1e-12)})


def test_pool_size_env(monkeypatch):
    monkeypatch.setenv("SIMQD_THREADS", "3")
    assert _pool_size() == 3
    monkeypatch.setenv("SIMQD_THREADS", "abc")
    with pytest.raises(ConfigError, match="SIMQD_THREADS"):
        _pool_size()
    monkeypatch.setenv("SIMQD_THREADS", "0")
    with pytest.raises(ConfigError, match="SIMQD_THREADS"):
        _pool_size()
    monkeypatch.delenv("SIMQD_THREADS")
    assert _pool_size() >= 1


def test_grid_refine_doubles_steps(tmp_path):
    base = base_config(d=["0.5ns"], include_dephasing=False)
    coarse = run_dynamics(parse_config_data(base), out=tmp_path / "c")
    fine = run_dynamics(
        parse_config_data({**base, "grid": {"refine": 2}}), out=tmp_path / "f"
    )
    assert fine["scenarios"][0]["n_steps"] == 2 * coarse["scenarios"][0]["n_steps"]


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["kernel", "--config", str(tmp_path / "nope.json")]) == 2
    assert "config error" in capsys.readouterr().err

    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(json.dumps(base_config(include_dephasing=False)))
    assert main(["dynamics", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "dynamics_summary.json").exists()
    # no output directory anywhere
    assert main(["dynamics", "--config", str(cfg_path)]) == 2
    assert "out" in capsys.readouterr().err


def test_cli_sweep_axis_override(tmp_path):
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(
        json.dumps(base_config(T=[0.4, 4.0], d=["0.5ns"], include_dephasing=False))
    )
    out = tmp_path / "o"
    rc = main(["sweep", "--config", str(cfg_path), "--axis", "temperature", "--out", str(out)])
    assert rc == 0
    assert (out / "sweep_temperature.csv").exists()


def test_cli_invalid_threads(tmp_path, monkeypatch, capsys):
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(
        json.dumps(base_config(T=[0.4, 4.0], include_dephasing=False))
    )
    monkeypatch.setenv("SIMQD_THREADS", "many")
    rc = main(["dynamics", "--config", str(cfg_path), "--out", str(tmp_path / "o")])
    assert rc == 2
    assert "SIMQD_THREADS" in capsys.readouterr().err


def test_cli_oracle_report(tmp_path):
    report_path = tmp_path / "report.json"
    rc = main(
        ["oracle", "--report", str(report_path),
         "--seed", "7", "--samples", "4000", "--modes", "300"]
    )
    assert rc == 0
    report = json.loads(report_path.read_text())
    assert report["all_pass"] is True
    assert report["seed"] == 7
    assert report["n_samples"] == 4000


def test_module_invocation(tmp_path):
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(json.dumps(base_config(include_dephasing=False)))
    proc = subprocess.run(
        [sys.executable, "-m", "simqd", "dynamics",
         "--config", str(cfg_path), "--out", str(tmp_path / "o")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "dynamics_T4K_d1e-12s.csv").exists()
