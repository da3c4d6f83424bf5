"""Pure-dephasing exponent of an emitter coupled to acoustic phonons.

Linear coupling of the excited-state projector to a continuum of
harmonic modes multiplies the optical coherence by ``exp(-gamma(t))``
with

    Re gamma(t) = integral J(w)/(2 w^2) * (1 - cos(w t)) * (4 n(w) + 2) dw
    Im gamma(t) = integral J(w)/w^2  * (sin(w t) - w t) dw

The real part rises from zero to a temperature-dependent plateau on the
timescale of the inverse cutoff frequency.  The imaginary part is
temperature independent and tends to ``-shift * t`` where
``shift = integral J/w dw``: a static renormalization of the emitter
line.  Propagation code that drives the emitter at its observed
(renormalized) resonance should remove that linear drift, which is what
``decay_factor_samples(..., shifted_frame=True)`` does; the tabulated
values keep the bare exponent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .material import MaterialParams, ThermalEnv, occupation_factor, spectral_density
from .quadrature import QuadratureSpec, spectral_integral, spectral_transforms

_PLATEAU_EXTENSION_RTOL = 0.02


def dephasing_integrand(omega, material: MaterialParams, env: ThermalEnv):
    """Frequency-resolved weight J/(2 w^2) * (4 n + 2) of the real exponent."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0.0):
        raise ValueError("dephasing_integrand needs omega > 0")
    out = 0.5 * spectral_density(omega, material) / omega**2 * occupation_factor(omega, env)
    return out if out.ndim else float(out)


def _weights(material: MaterialParams, env: ThermalEnv):
    def real_weight(omega):
        return 0.5 * spectral_density(omega, material) / omega**2 * occupation_factor(omega, env)

    def imag_weight(omega):
        return spectral_density(omega, material) / omega**2

    def shift_weight(omega):
        return spectral_density(omega, material) / omega

    return real_weight, imag_weight, shift_weight


def _omega_window(material: MaterialParams) -> tuple[float, float]:
    # the Gaussian roll-off leaves < 1e-17 of the integrands beyond 2x
    # the cutoff scale at any temperature of interest
    return 0.0, 2.0 * material.cutoff_scale


def _kernel_transforms(times, material, env, quad):
    lo, hi = _omega_window(material)
    tr = spectral_transforms(_weights(material, env), lo, hi, times, quad)
    plateau = float(tr.totals[0])
    shift = float(tr.totals[2])
    t_arr = np.asarray(times, dtype=float)
    re = plateau - tr.cosine[0]
    re[t_arr == 0.0] = 0.0  # exact identity, lost to the subtraction above
    im = tr.sine[1] - shift * t_arr
    return re, im, plateau, shift, tr.error_estimate


def kernel_complex(t, material: MaterialParams, env: ThermalEnv, quad: QuadratureSpec | None = None):
    """Dephasing exponent gamma(t) for t >= 0 [s]; scalar in, scalar out."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr < 0.0):
        raise ValueError("kernel times must be >= 0; negative lags follow by conjugation")
    re, im, _, _, _ = _kernel_transforms(t_arr, material, env, quad)
    out = re + 1j * im
    return out if np.ndim(t) else complex(out[0])


def kernel_real(t, material: MaterialParams, env: ThermalEnv, quad: QuadratureSpec | None = None):
    """Real part of the dephasing exponent (decay of the coherence modulus)."""
    out = kernel_complex(t, material, env, quad)
    return out.real if np.ndim(t) else float(out.real)


def kernel_imag(t, material: MaterialParams, env: ThermalEnv, quad: QuadratureSpec | None = None):
    """Imaginary part of the dephasing exponent (phase drift, T independent)."""
    out = kernel_complex(t, material, env, quad)
    return out.imag if np.ndim(t) else float(out.imag)


def plateau_real(material: MaterialParams, env: ThermalEnv, quad: QuadratureSpec | None = None) -> float:
    """Long-time limit of the real exponent: integral of J/(2 w^2) (4 n + 2)."""
    weights = _weights(material, env)
    lo, hi = _omega_window(material)
    return spectral_integral(weights[0], lo, hi, quad)


def polaron_shift_rate(material: MaterialParams, quad: QuadratureSpec | None = None) -> float:
    """Static line-shift rate integral of J/w [rad/s]."""
    weights = _weights(material, ThermalEnv(0.0))
    lo, hi = _omega_window(material)
    return spectral_integral(weights[2], lo, hi, quad)


@dataclass(frozen=True)
class DephasingKernel:
    """Tabulated exponent gamma on a uniform time grid starting at zero.

    ``values[k] = gamma(times[k])`` with the bare (unshifted) imaginary
    part.  ``plateau_re`` and ``shift_rate`` are the converged frequency
    integrals used for consistency checks and for extending the table.
    """

    times: np.ndarray
    values: np.ndarray
    plateau_re: float
    shift_rate: float
    material: MaterialParams
    env: ThermalEnv
    error_estimate: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values)
        if t.ndim != 1 or t.size < 2 or v.shape != t.shape:
            raise ValueError("times and values must be matching 1-D arrays, >= 2 points")
        steps = np.diff(t)
        if t[0] != 0.0 or not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("time grid must be uniform and start at 0")
        if v[0] != 0.0:
            raise ValueError("gamma(0) must be exactly 0")
        if np.any(v.real < -1e-12):
            raise ValueError("real exponent must be non-negative")

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])


def tabulate_kernel(
    material: MaterialParams,
    env: ThermalEnv,
    t_max: float = 4.0e-11,
    n_points: int | None = None,
    quad: QuadratureSpec | None = None,
) -> DephasingKernel:
    """Tabulate gamma(t) on ``n_points`` uniform samples of [0, t_max].

    The default grid (5 fs steps over 40 ps) resolves the oscillatory
    transient and reaches deep into the plateau for the stock material.
    """
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    if n_points is None:
        n_points = int(round(t_max / 5.0e-15)) + 1
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    step = t_max / (n_points - 1)
    times = np.arange(n_points) * step
    re, im, plateau, shift, err = _kernel_transforms(times, material, env, quad)
    values = re + 1j * im
    values[0] = 0.0
    np.maximum(values.real, 0.0, out=values.real)
    return DephasingKernel(times, values, plateau, shift, material, env, err)


def kernel_at(kernel: DephasingKernel, tau):
    """Interpolate the tabulated exponent at lag tau; gamma(-tau) = conj(gamma(tau))."""
    tau = np.asarray(tau, dtype=float)
    mag = np.abs(tau)
    if np.any(mag > kernel.t_max * (1.0 + 1e-12)):
        raise ValueError("lag outside the tabulated range")
    re, im = _table_values(kernel, np.minimum(mag, kernel.t_max))
    out = re + 1j * np.where(tau < 0.0, -im, im)
    return out if tau.ndim else complex(out)


def _table_values(kernel: DephasingKernel, tau: np.ndarray):
    """Cubic interpolation of the table; the 5 fs default grid then sits
    well under 1e-6 absolute error against direct quadrature."""
    vals = CubicSpline(kernel.times, kernel.values)(tau)
    return np.maximum(vals.real, 0.0), vals.imag


def cutoff_frequency(
    material: MaterialParams,
    env: ThermalEnv,
    threshold: float = 0.5,
    n_grid: int = 20001,
) -> float:
    """Falling-edge knee of the real-part integrand [rad/s].

    Returns the largest frequency at which the weight J/(2 w^2)(4 n + 2)
    still reaches ``threshold`` times its maximum.  With the Gaussian
    roll-off the edge is steep, so the knee is insensitive to the exact
    threshold; one half is used as the operating definition.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    lo, hi = _omega_window(material)
    grid = np.linspace(lo, hi, n_grid)[1:]
    w = dephasing_integrand(grid, material, env)
    level = threshold * float(np.max(w))
    above = np.nonzero(w >= level)[0]
    k = int(above[-1])
    if k + 1 >= grid.size:
        raise ValueError("integrand does not fall below threshold inside the window")
    # linear interpolation across the crossing
    f0, f1 = w[k], w[k + 1]
    frac = (level - f0) / (f1 - f0)
    return float(grid[k] + frac * (grid[k + 1] - grid[k]))


def decay_factor_samples(
    kernel: DephasingKernel | None,
    tau,
    shifted_frame: bool = True,
    extend_plateau: bool = False,
):
    """Coherence factor exp(-gamma(tau)) for tau >= 0, ready for propagation.

    With ``shifted_frame=True`` the linear drift ``-shift_rate * tau`` is
    removed from the imaginary exponent, i.e. the emitter is taken to be
    driven at its observed (renormalized) line.  Lags beyond the table
    are allowed only with ``extend_plateau=True`` and only when the
    table demonstrably reached its plateau; there the real exponent is
    frozen at the plateau and the shifted phase at zero.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0.0):
        raise ValueError("decay_factor_samples needs tau >= 0")
    if kernel is None:
        out = np.ones(tau.shape, dtype=complex)
        return out if tau.ndim else complex(out)

    beyond = tau > kernel.t_max * (1.0 + 1e-12)
    if np.any(beyond):
        if not extend_plateau:
            raise ValueError("lag outside the tabulated range (pass extend_plateau=True)")
        tail = kernel.values[-1]
        if abs(tail.real - kernel.plateau_re) > _PLATEAU_EXTENSION_RTOL * kernel.plateau_re:
            raise ValueError("kernel table does not reach its plateau; tabulate further")
        if abs(tail.imag + kernel.shift_rate * kernel.t_max) > 1e-6 * kernel.shift_rate * kernel.t_max:
            raise ValueError("imaginary exponent not yet linear at the end of the table")

    inside = np.minimum(tau, kernel.t_max)
    re, im = _table_values(kernel, inside)
    re = np.where(beyond, kernel.plateau_re, re)
    if shifted_frame:
        im = im + kernel.shift_rate * inside
        im = np.where(beyond, 0.0, im)
    else:
        im = np.where(beyond, -kernel.shift_rate * tau, im)
    out = np.exp(-(re + 1j * im))
    return out if tau.ndim else complex(out)
