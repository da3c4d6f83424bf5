import numpy as np
import pytest
from numpy.testing import assert_allclose

from simqd.errors import PrecisionError
from simqd.kernel import kernel_complex
from simqd.material import GAAS_DEFAULT, ThermalEnv
from simqd.oracle import (
    ModeDiscretization,
    SingleModeSpec,
    closed_form_overlap,
    discretized_gamma,
    fock_overlap,
    oracle_report,
    sample_thermal_overlap,
    thermal_average_closed_form,
)

MODE = SingleModeSpec(frequency=1.3e12, coupling=2.4e11, amplitude=0.7 - 0.2j)


def test_equal_times_give_unity():
    assert closed_form_overlap(MODE, 1.7e-12, 1.7e-12) == 1.0 + 0.0j
    assert fock_overlap(MODE, 1.7e-12, 1.7e-12) == pytest.approx(1.0 + 0.0j, abs=1e-12)


def test_zero_coupling_gives_unity():
    off = SingleModeSpec(frequency=1e12, coupling=0.0, amplitude=1.1j)
    assert closed_form_overlap(off, 2e-12, 0.5e-12) == 1.0 + 0.0j


def test_modulus_never_exceeds_one():
    rng = np.random.default_rng(3)
    for _ in range(50):
        mode = SingleModeSpec(
            frequency=10 ** rng.uniform(11.0, 13.0),
            coupling=10 ** rng.uniform(10.0, 12.0),
            amplitude=complex(rng.normal(scale=1.5), rng.normal(scale=1.5)),
        )
        t, tp = rng.uniform(0.0, 5e-12, 2)
        assert abs(closed_form_overlap(mode, t, tp)) <= 1.0 + 1e-12


def test_swap_conjugates():
    v = closed_form_overlap(MODE, 2.2e-12, 0.4e-12, -0.3e-12)
    w = closed_form_overlap(MODE, 0.4e-12, 2.2e-12, -0.3e-12)
    assert v == w.conjugate()


def test_fock_matches_closed_form_on_draws():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(5):
        w = 10 ** rng.uniform(11.5, 12.8)
        mode = SingleModeSpec(
            frequency=w,
            coupling=w * rng.uniform(0.05, 0.3),
            amplitude=complex(rng.normal(), rng.normal()),
        )
        tp, t = np.sort(rng.uniform(0.0, 5e-12, 2))
        ti = rng.uniform(-1e-12, 0.0)
        dev = abs(closed_form_overlap(mode, t, tp, ti) - fock_overlap(mode, t, tp, ti))
        worst = max(worst, dev)
    assert worst < 1e-10


def test_fock_escalates_basis_when_needed():
    strong = SingleModeSpec(frequency=3e11, coupling=1.2e12, amplitude=2.0 + 0.0j)
    got = fock_overlap(strong, 3e-12, 0.0, n_max=10)
    want = closed_form_overlap(strong, 3e-12, 0.0)
    assert abs(got - want) < 1e-8


def test_fock_escalation_disabled_raises():
    strong = SingleModeSpec(frequency=3e11, coupling=1.2e12, amplitude=2.0 + 0.0j)
    with pytest.raises(PrecisionError):
        fock_overlap(strong, 3e-12, 0.0, n_max=10, auto_escalate=False)


def test_thermal_closed_form_reduces_to_vacuum_at_zero_temperature():
    cold = ThermalEnv(0.0)
    bare = SingleModeSpec(frequency=MODE.frequency, coupling=MODE.coupling)
    for tau in (0.3e-12, 1.1e-12):
        assert_allclose(
            thermal_average_closed_form(MODE, cold, tau, 0.0),
            closed_form_overlap(bare, tau, 0.0),
            rtol=1e-14,
        )


def test_thermal_modulus_bounded_and_decreasing_with_temperature():
    tau = 0.8e-12
    mags = [
        abs(thermal_average_closed_form(MODE, ThermalEnv(T), tau, 0.0))
        for T in (0.0, 4.0, 40.0)
    ]
    assert all(m <= 1.0 for m in mags)
    assert mags[0] > mags[1] > mags[2]


def test_monte_carlo_thermal_average():
    rng = np.random.default_rng(42)
    env = ThermalEnv(6.0)
    n = 40000
    mc = sample_thermal_overlap(MODE, env, 1.2e-12, 0.0, n, rng)
    exact = thermal_average_closed_form(MODE, env, 1.2e-12, 0.0)
    assert abs(mc - exact) < 10.0 / np.sqrt(n)


def test_single_mode_comb_equals_thermal_exponent():
    comb = ModeDiscretization(
        frequencies=np.array([MODE.frequency]),
        couplings_sq=np.array([MODE.coupling**2]),
    )
    env = ThermalEnv(4.0)
    tau = 0.9e-12
    gamma = discretized_gamma(comb, env, tau)
    assert_allclose(np.exp(-gamma), thermal_average_closed_form(MODE, env, tau, 0.0), rtol=1e-12)


def test_comb_matches_continuum_kernel():
    comb = ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=400)
    env = ThermalEnv(4.0)
    taus = np.array([0.1, 0.5, 1.0, 2.0, 5.0]) * 1e-12
    approx = discretized_gamma(comb, env, taus)
    exact = kernel_complex(taus, GAAS_DEFAULT, env)
    assert np.max(np.abs(approx - exact) / np.abs(exact)) < 1e-3


def test_comb_coupling_sum_rule():
    comb = ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=2000)
    from scipy.integrate import quad
    from simqd.material import spectral_density

    ref, _ = quad(lambda w: spectral_density(w, GAAS_DEFAULT), 0.0,
                  2.0 * GAAS_DEFAULT.cutoff_scale, limit=200)
    assert_allclose(comb.coupling_weight(), ref, rtol=1e-3)


def test_comb_refinement_improves_coarse_side():
    env = ThermalEnv(4.0)
    tau = 2.0e-12
    exact = kernel_complex(tau, GAAS_DEFAULT, env)
    coarse = discretized_gamma(ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=6), env, tau)
    fine = discretized_gamma(ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=24), env, tau)
    assert abs(fine - exact) < abs(coarse - exact)


def test_mode_discretization_validation():
    with pytest.raises(ValueError):
        ModeDiscretization(np.array([-1.0]), np.array([1.0]))
    with pytest.raises(ValueError):
        ModeDiscretization.from_material(GAAS_DEFAULT, n_modes=0)
    with pytest.raises(ValueError):
        SingleModeSpec(frequency=0.0, coupling=1.0)


def test_oracle_report_smoke():
    rep = oracle_report(GAAS_DEFAULT, seed=5, n_samples=5000, n_modes=300)
    assert rep["all_pass"] is True
    assert rep["fock_vs_closed_max_abs_dev"] < 1e-8
    assert rep["comb_vs_kernel_max_rel_dev"] < 1e-3
    assert isinstance(rep["thermal_mc_tolerance"], float)
