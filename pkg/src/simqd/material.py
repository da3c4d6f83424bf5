"""Host-crystal parameters, phonon spectral density and thermal occupation.

Everything is SI: angular frequencies in rad/s, energies in J, lengths in
m, temperatures in K.  The spectral density implemented here is the bulk
deformation-potential coupling of a carrier confined on a length scale
``l``, which is super-ohmic (cubic at low frequency) with a Gaussian
roll-off governed by ``omega_l = 2*pi*u/l``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import electron_volt, hbar
from scipy.constants import k as k_B


@dataclass(frozen=True)
class MaterialParams:
    """Acoustic-phonon coupling constants of the host crystal.

    Parameters
    ----------
    mass_density : float
        Crystal mass density [kg/m^3].
    sound_velocity : float
        Longitudinal sound velocity [m/s].
    deformation_potential_electron : float
        Conduction-band deformation potential [J].
    deformation_potential_hole : float
        Valence-band deformation potential [J].  Only the difference of
        the two potentials enters the coupling.
    localization_length : float
        Carrier localization length [m]; sets the Gaussian cutoff of the
        spectral density.
    """

    mass_density: float
    sound_velocity: float
    deformation_potential_electron: float
    deformation_potential_hole: float
    localization_length: float

    def __post_init__(self):
        if self.mass_density <= 0.0:
            raise ValueError("mass_density must be positive")
        if self.sound_velocity <= 0.0:
            raise ValueError("sound_velocity must be positive")
        if self.localization_length <= 0.0:
            raise ValueError("localization_length must be positive")

    @property
    def cutoff_scale(self) -> float:
        """Gaussian roll-off frequency 2*pi*u/l [rad/s]."""
        return 2.0 * np.pi * self.sound_velocity / self.localization_length

    @property
    def coupling_prefactor(self) -> float:
        """Cubic-term prefactor (D_h - D_e)^2 / (4 pi^2 rho hbar u^5) [s^2]."""
        diff = self.deformation_potential_hole - self.deformation_potential_electron
        return diff**2 / (4.0 * np.pi**2 * self.mass_density * hbar * self.sound_velocity**5)

    @property
    def gauss_coefficient(self) -> float:
        """Exponent coefficient g in exp(-g * omega^2), g = pi^2 / cutoff_scale^2 [s^2]."""
        return np.pi**2 / self.cutoff_scale**2


@dataclass(frozen=True)
class ThermalEnv:
    """Phonon bath temperature [K]."""

    temperature: float

    def __post_init__(self):
        if self.temperature < 0.0:
            raise ValueError("temperature must be >= 0")

    @property
    def thermal_energy(self) -> float:
        """k_B * T [J]."""
        return k_B * self.temperature


GAAS_DEFAULT = MaterialParams(
    mass_density=5370.0,
    sound_velocity=5110.0,
    deformation_potential_electron=7.0 * electron_volt,
    deformation_potential_hole=-3.5 * electron_volt,
    localization_length=5.0e-9,
)

MATERIAL_PROFILES = {"GaAs-default": GAAS_DEFAULT}


def spectral_density(omega, material: MaterialParams):
    """Phonon spectral density J(omega) [1/s] for omega >= 0 [rad/s].

    Cubic times a Gaussian: ``A * omega**3 * exp(-g * omega**2)`` with
    ``A = material.coupling_prefactor`` and ``g = material.gauss_coefficient``.
    """
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0.0):
        raise ValueError("spectral_density is defined for omega >= 0")
    out = material.coupling_prefactor * omega**3 * np.exp(-material.gauss_coefficient * omega**2)
    return out if out.ndim else float(out)


def form_factor(q, localization_length: float):
    """Gaussian confinement form factor exp(-(q*l)^2 / 4) for wavenumber q [1/m]."""
    if localization_length <= 0.0:
        raise ValueError("localization_length must be positive")
    q = np.asarray(q, dtype=float)
    out = np.exp(-((q * localization_length) ** 2) / 4.0)
    return out if out.ndim else float(out)


def bose_occupation(omega, env: ThermalEnv):
    """Mean thermal occupation of a mode at omega [rad/s]; zero at T = 0."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0.0):
        raise ValueError("bose_occupation needs omega > 0")
    if env.temperature == 0.0:
        out = np.zeros_like(omega)
        return out if out.ndim else 0.0
    x = hbar * omega / env.thermal_energy
    # expm1 keeps the small-x limit k_B T / (hbar omega) accurate; the
    # overflow at large x is benign (1/inf -> 0).
    with np.errstate(over="ignore"):
        out = 1.0 / np.expm1(x)
    return out if out.ndim else float(out)


def occupation_factor(omega, env: ThermalEnv):
    """Symmetrized weight 4*n(omega) + 2 entering the dephasing exponent."""
    return 4.0 * bose_occupation(omega, env) + 2.0


def gamma_from_cavity(coupling_g: float, cavity_decay_kappa: float) -> float:
    """Effective emitter decay rate g^2 / kappa [1/s] into the cavity port.

    Valid after adiabatic elimination of a broad cavity mode; a warning is
    issued when ``kappa < 10 * g`` since the elimination is then marginal.
    """
    if cavity_decay_kappa <= 0.0:
        raise ValueError("cavity_decay_kappa must be positive")
    if coupling_g < 0.0:
        raise ValueError("coupling_g must be >= 0")
    if cavity_decay_kappa < 10.0 * coupling_g:
        warnings.warn(
            "cavity decay is not large compared to the coupling; "
            "adiabatic elimination of the cavity mode is marginal",
            UserWarning,
            stacklevel=2,
        )
    return coupling_g**2 / cavity_decay_kappa
