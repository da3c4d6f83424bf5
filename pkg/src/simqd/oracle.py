"""Independent checks of the dephasing exponent from first principles.

A single harmonic mode coupled to the excited-state projector is solved
three ways: operator disentangling (closed form), brute-force evolution
in a truncated number basis, and Monte-Carlo averaging of the closed
form over a thermal coherent-state distribution.  Summing the exact
per-mode exponent over a frequency comb then reproduces the continuum
kernel.  These routines are deliberately simple and slow; they validate
the production code paths rather than replace them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar
from scipy.special import gammainc

from .errors import PrecisionError
from .kernel import kernel_complex
from .material import MaterialParams, ThermalEnv, bose_occupation, spectral_density
from .quadrature import QuadratureSpec

_NMAX_CEILING = 400
_NORM_DEFICIT_TOL = 1e-10


@dataclass(frozen=True)
class SingleModeSpec:
    """One bath mode: frequency and coupling [rad/s], coherent amplitude."""

    frequency: float
    coupling: float
    amplitude: complex = 0j

    def __post_init__(self):
        if self.frequency <= 0.0:
            raise ValueError("frequency must be positive")


def closed_form_overlap(mode: SingleModeSpec, t: float, t_prime: float, t_initial: float = 0.0) -> complex:
    """Mode-frame overlap <alpha| U0(t)^+ U(t - t') U0(t') |alpha> in closed form.

    U is generated by ``w N + lam (P + P^+)`` and U0 by ``w N`` alone.
    Disentangling the displaced evolution gives

        exp(a * conj(alpha) - conj(a) * alpha) * exp(-gamma_vac(tau))

    with ``a = -z (e^{i w (t - ti)} - e^{i w (t' - ti)})``, ``z = lam / w``,
    ``tau = t - t'`` and the vacuum exponent
    ``gamma_vac = z^2 [(1 - cos(w tau)) + i (sin(w tau) - w tau)]``.
    The alpha-dependent factor is a pure phase, so the modulus never
    exceeds one.
    """
    w, z = mode.frequency, mode.coupling / mode.frequency
    tau = t - t_prime
    a = -z * (np.exp(1j * w * (t - t_initial)) - np.exp(1j * w * (t_prime - t_initial)))
    gamma_vac = z**2 * ((1.0 - np.cos(w * tau)) + 1j * (np.sin(w * tau) - w * tau))
    alpha = complex(mode.amplitude)
    return complex(np.exp(a * np.conj(alpha) - np.conj(a) * alpha) * np.exp(-gamma_vac))


def _coherent_vector(alpha: complex, dim: int) -> np.ndarray:
    if alpha == 0:
        vec = np.zeros(dim, dtype=complex)
        vec[0] = 1.0
        return vec
    n = np.arange(dim)
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, dim)))))
    return np.exp(-0.5 * abs(alpha) ** 2 + n * np.log(complex(alpha)) - 0.5 * log_fact)


def fock_overlap(
    mode: SingleModeSpec,
    t: float,
    t_prime: float,
    t_initial: float = 0.0,
    n_max: int = 60,
    auto_escalate: bool = True,
) -> complex:
    """Same overlap as `closed_form_overlap` by dense evolution in a number basis.

    The basis is large enough when the coherent state displaced by the
    maximal excursion ``2 lam / w`` leaves a Poisson tail below 1e-10;
    otherwise ``n_max`` is escalated (or PrecisionError raised when
    escalation is disabled or the ceiling is hit).
    """
    w, lam = mode.frequency, mode.coupling
    alpha = complex(mode.amplitude)
    reach = (abs(alpha) + 2.0 * lam / w) ** 2
    while True:
        deficit = float(gammainc(n_max + 1, reach)) if reach > 0 else 0.0
        if deficit < _NORM_DEFICIT_TOL:
            break
        if not auto_escalate:
            raise PrecisionError(
                f"n_max={n_max} leaves a displaced-state norm deficit of {deficit:.2e}"
            )
        if n_max >= _NMAX_CEILING:
            raise PrecisionError(f"basis ceiling {_NMAX_CEILING} insufficient (deficit {deficit:.2e})")
        n_max = min(_NMAX_CEILING, n_max * 3 // 2)

    dim = n_max + 1
    nums = np.arange(dim)
    vec = _coherent_vector(alpha, dim)

    ladder = np.sqrt(np.arange(1, dim))
    h = np.diag(w * nums).astype(complex)
    h += lam * (np.diag(ladder, 1) + np.diag(ladder, -1))
    evals, evecs = np.linalg.eigh(h)

    tau = t - t_prime
    vec = np.exp(-1j * w * nums * (t_prime - t_initial)) * vec
    vec = evecs @ (np.exp(-1j * evals * tau) * (evecs.conj().T @ vec))
    vec = np.exp(1j * w * nums * (t - t_initial)) * vec
    return complex(np.vdot(_coherent_vector(alpha, dim), vec))


def thermal_average_closed_form(mode: SingleModeSpec, env: ThermalEnv, t: float, t_prime: float) -> complex:
    """Thermal average of the overlap: exp(-gamma_th(tau)) with the
    vacuum real part boosted by (2 n + 1).  The coherent amplitude of
    ``mode`` is ignored; the average is over the thermal ensemble."""
    w, z = mode.frequency, mode.coupling / mode.frequency
    tau = t - t_prime
    n_occ = bose_occupation(w, env)
    gamma = z**2 * ((1.0 - np.cos(w * tau)) * (2.0 * n_occ + 1.0) + 1j * (np.sin(w * tau) - w * tau))
    return complex(np.exp(-gamma))


def sample_thermal_overlap(
    mode: SingleModeSpec,
    env: ThermalEnv,
    t: float,
    t_prime: float,
    n_samples: int,
    rng: np.random.Generator,
    t_initial: float = 0.0,
) -> complex:
    """Monte-Carlo thermal average of `closed_form_overlap`.

    Coherent amplitudes are drawn from the isotropic Gaussian with
    ``<|alpha|^2> = n(w)``; the per-sample factor has unit modulus bound,
    so the estimator variance is bounded for any mode."""
    w, z = mode.frequency, mode.coupling / mode.frequency
    n_occ = bose_occupation(w, env)
    sigma = np.sqrt(n_occ / 2.0)
    alphas = sigma * (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples))
    tau = t - t_prime
    a = -z * (np.exp(1j * w * (t - t_initial)) - np.exp(1j * w * (t_prime - t_initial)))
    gamma_vac = z**2 * ((1.0 - np.cos(w * tau)) + 1j * (np.sin(w * tau) - w * tau))
    vals = np.exp(a * np.conj(alphas) - np.conj(a) * alphas)
    return complex(np.mean(vals) * np.exp(-gamma_vac))


@dataclass(frozen=True)
class ModeDiscretization:
    """Frequency comb with squared couplings matched to a spectral density."""

    frequencies: np.ndarray
    couplings_sq: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        c = np.asarray(self.couplings_sq, dtype=float)
        if f.ndim != 1 or f.size == 0 or c.shape != f.shape:
            raise ValueError("frequencies and couplings_sq must be matching 1-D arrays")
        if np.any(f <= 0.0) or np.any(c < 0.0):
            raise ValueError("frequencies must be positive and couplings_sq non-negative")

    @classmethod
    def from_material(
        cls,
        material: MaterialParams,
        n_modes: int = 2000,
        omega_max: float | None = None,
    ) -> "ModeDiscretization":
        """Right-endpoint comb w_j = j * dw with lam_j^2 = J(w_j) * dw."""
        if n_modes < 1:
            raise ValueError("n_modes must be >= 1")
        if omega_max is None:
            omega_max = 2.0 * material.cutoff_scale
        dw = omega_max / n_modes
        freqs = dw * np.arange(1, n_modes + 1)
        return cls(freqs, spectral_density(freqs, material) * dw)

    def coupling_weight(self) -> float:
        """Sum of lam_j^2, the discrete stand-in for integral J dw."""
        return float(np.sum(self.couplings_sq))


def discretized_gamma(modes: ModeDiscretization, env: ThermalEnv, tau):
    """Total exponent of the comb: sum of exact per-mode thermal exponents."""
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    w = modes.frequencies
    z2 = modes.couplings_sq / w**2
    occ = 2.0 * bose_occupation(w, env) + 1.0
    phase = np.outer(tau_arr, w)
    re = (z2 * occ) @ (1.0 - np.cos(phase)).T
    im = z2 @ (np.sin(phase) - phase).T
    out = re + 1j * im
    return out if np.ndim(tau) else complex(out[0])


def oracle_report(
    material: MaterialParams,
    seed: int = 20240817,
    n_samples: int = 200000,
    n_modes: int = 2000,
) -> dict:
    """Run the three cross-checks and return a verdict dictionary.

    Checks: closed form vs number-basis evolution on random draws,
    Monte-Carlo thermal average vs the analytic thermal exponent, and
    the discretized comb vs the continuum kernel of ``material``.
    """
    rng = np.random.default_rng(seed)

    draws = []
    for _ in range(20):
        mode = SingleModeSpec(
            frequency=10 ** rng.uniform(11.5, 13.0),
            coupling=10 ** rng.uniform(10.5, 12.0),
            amplitude=complex(rng.normal(), rng.normal()),
        )
        ts = np.sort(rng.uniform(0.0, 5e-12, 2))
        t_i = rng.uniform(-1e-12, 0.0)
        c = closed_form_overlap(mode, ts[1], ts[0], t_i)
        f = fock_overlap(mode, ts[1], ts[0], t_i)
        draws.append(abs(c - f))
    fock_dev = float(np.max(draws))

    mc_devs = []
    for T, w, lam, tau in [(4.0, 1.5e12, 2.0e11, 1.2e-12), (10.0, 8.0e11, 1.0e11, 2.0e-12)]:
        mode = SingleModeSpec(frequency=w, coupling=lam)
        env = ThermalEnv(T)
        mc = sample_thermal_overlap(mode, env, tau, 0.0, n_samples, rng)
        exact = thermal_average_closed_form(mode, env, tau, 0.0)
        mc_devs.append(abs(mc - exact))
    mc_dev = float(np.max(mc_devs))
    mc_tol = float(max(10.0 / np.sqrt(n_samples), 1e-3))

    comb = ModeDiscretization.from_material(material, n_modes=n_modes)
    taus = np.array([0.1, 0.5, 1.0, 2.0, 5.0]) * 1e-12
    comb_devs = []
    for T in (0.4, 4.0, 40.0):
        env = ThermalEnv(T)
        approx = discretized_gamma(comb, env, taus)
        exact = kernel_complex(taus, material, env, QuadratureSpec())
        comb_devs.append(np.max(np.abs(approx - exact) / np.abs(exact)))
    comb_dev = float(np.max(comb_devs))

    return {
        "fock_vs_closed_max_abs_dev": fock_dev,
        "fock_vs_closed_pass": bool(fock_dev < 1e-8),
        "thermal_mc_max_abs_dev": mc_dev,
        "thermal_mc_tolerance": mc_tol,
        "thermal_mc_pass": bool(mc_dev < mc_tol),
        "comb_vs_kernel_max_rel_dev": comb_dev,
        "comb_vs_kernel_pass": bool(comb_dev < 1e-3),
        "n_samples": n_samples,
        "n_modes": n_modes,
        "seed": seed,
        "all_pass": bool(fock_dev < 1e-8 and mc_dev < mc_tol and comb_dev < 1e-3),
    }
