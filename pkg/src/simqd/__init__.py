"""Phonon-dephased two-level emitter driven by a one-photon pulse.

Time evolution of the optical coherence and the excited-state
population of a two-level system in a one-sided cavity, hit by a weak
coherent Gaussian pulse, with pure dephasing from acoustic phonons
entering through an exactly tabulated exponent exp(-gamma(t)).
"""

from .config import ScenarioConfig, config_digest, parse_config, serialize_config
from .dynamics import (
    CouplingRates,
    DynamicsResult,
    EfficiencyOptimum,
    FieldEvolution,
    PulseSpec,
    SimGrid,
    longitudinal,
    max_transfer_efficiency,
    propagate_fields_nodephasing,
    pulse_envelope,
    simulate,
    transversal,
)
from .errors import ConfigError, PrecisionError, QuadratureError
from .kernel import (
    DephasingKernel,
    cutoff_frequency,
    decay_factor_samples,
    dephasing_integrand,
    kernel_at,
    kernel_complex,
    kernel_imag,
    kernel_real,
    plateau_real,
    polaron_shift_rate,
    tabulate_kernel,
)
from .material import (
    GAAS_DEFAULT,
    MATERIAL_PROFILES,
    MaterialParams,
    ThermalEnv,
    bose_occupation,
    gamma_from_cavity,
    spectral_density,
)
from .oracle import (
    ModeDiscretization,
    SingleModeSpec,
    closed_form_overlap,
    discretized_gamma,
    fock_overlap,
    oracle_report,
    sample_thermal_overlap,
    thermal_average_closed_form,
)
from .quadrature import QuadratureSpec, spectral_integral, spectral_transforms
from .runner import EfficiencyMap, run_dynamics, run_kernel, run_sweep

__version__ = "0.1.0"

__all__ = [
    "CouplingRates",
    "ConfigError",
    "DephasingKernel",
    "DynamicsResult",
    "EfficiencyMap",
    "EfficiencyOptimum",
    "FieldEvolution",
    "GAAS_DEFAULT",
    "MATERIAL_PROFILES",
    "MaterialParams",
    "ModeDiscretization",
    "PrecisionError",
    "PulseSpec",
    "QuadratureError",
    "QuadratureSpec",
    "ScenarioConfig",
    "SimGrid",
    "SingleModeSpec",
    "ThermalEnv",
    "bose_occupation",
    "closed_form_overlap",
    "config_digest",
    "cutoff_frequency",
    "decay_factor_samples",
    "dephasing_integrand",
    "discretized_gamma",
    "fock_overlap",
    "gamma_from_cavity",
    "kernel_at",
    "kernel_complex",
    "kernel_imag",
    "kernel_real",
    "longitudinal",
    "max_transfer_efficiency",
    "oracle_report",
    "parse_config",
    "plateau_real",
    "polaron_shift_rate",
    "propagate_fields_nodephasing",
    "pulse_envelope",
    "run_dynamics",
    "run_kernel",
    "run_sweep",
    "sample_thermal_overlap",
    "serialize_config",
    "simulate",
    "spectral_density",
    "spectral_integral",
    "spectral_transforms",
    "tabulate_kernel",
    "thermal_average_closed_form",
    "transversal",
]
