"""Vectorized adaptive quadrature for spectral integrals.

The dephasing integrands are smooth on a finite frequency window but
carry trigonometric factors that oscillate with period ``2*pi/t``.  A
composite Gauss-Legendre rule is therefore built with panels no wider
than a fraction of the shortest oscillation period, and the panel count
is doubled until the whole batch of requested transforms is stable to
the requested relative tolerance.  All time points share one set of
nodes so the evaluation is a pair of matrix products rather than a loop
over scalar quadratures.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

_CHUNK_BUDGET = 2.5e7  # phase-matrix entries held at once


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and refinement limits for the spectral integrals."""

    rel_tolerance: float = 1.0e-9
    max_refinements: int = 8
    nodes_per_panel: int = 16
    panels_per_period: int = 8

    def __post_init__(self):
        if self.rel_tolerance <= 0.0:
            raise ValueError("rel_tolerance must be positive")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if self.nodes_per_panel < 2:
            raise ValueError("nodes_per_panel must be >= 2")
        if self.panels_per_period < 1:
            raise ValueError("panels_per_period must be >= 1")


@dataclass(frozen=True)
class SpectralTransforms:
    """Converged batch of plain, cosine and sine frequency integrals.

    ``totals[i]`` is the integral of weight function i; ``cosine[i, k]``
    and ``sine[i, k]`` are its cos(omega*t_k) / sin(omega*t_k) moments.
    """

    totals: np.ndarray
    cosine: np.ndarray
    sine: np.ndarray
    error_estimate: float
    refinements: int


@lru_cache(maxsize=8)
def _reference_rule(n_nodes: int):
    return np.polynomial.legendre.leggauss(n_nodes)


def _composite_rule(lo: float, hi: float, n_panels: int, n_nodes: int):
    x, w = _reference_rule(n_nodes)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _evaluate(weight_fns, lo, hi, times, n_panels, n_nodes):
    nodes, weights = _composite_rule(lo, hi, n_panels, n_nodes)
    values = np.stack([np.asarray(fn(nodes), dtype=float) for fn in weight_fns])
    weighted = values * weights[None, :]
    totals = weighted.sum(axis=1)

    n_t = times.size
    cosine = np.empty((len(weight_fns), n_t))
    sine = np.empty((len(weight_fns), n_t))
    if n_t:
        blk = max(1, int(_CHUNK_BUDGET / nodes.size))
        for start in range(0, n_t, blk):
            sl = slice(start, min(start + blk, n_t))
            phase = np.outer(times[sl], nodes)
            cosine[:, sl] = weighted @ np.cos(phase).T
            sine[:, sl] = weighted @ np.sin(phase).T
    return totals, cosine, sine


def _batch_difference(prev, cur):
    err = 0.0
    for i in range(cur[0].size):
        scale = max(
            abs(cur[0][i]),
            float(np.max(np.abs(cur[1][i]), initial=0.0)),
            float(np.max(np.abs(cur[2][i]), initial=0.0)),
            np.finfo(float).tiny,
        )
        delta = max(
            abs(cur[0][i] - prev[0][i]),
            float(np.max(np.abs(cur[1][i] - prev[1][i]), initial=0.0)),
            float(np.max(np.abs(cur[2][i] - prev[2][i]), initial=0.0)),
        )
        err = max(err, delta / scale)
    return err


def spectral_transforms(weight_fns, lo: float, hi: float, times=(), spec: QuadratureSpec | None = None) -> SpectralTransforms:
    """Integrate several weight functions and their cos/sin moments at once.

    Parameters
    ----------
    weight_fns : sequence of callables
        Each maps an array of frequencies [rad/s] to integrand values.
        Nodes are strictly interior, so integrable endpoint removable
        singularities (e.g. division by omega) are safe.
    lo, hi : float
        Integration window [rad/s].
    times : array_like
        Times [s] at which the cosine/sine moments are wanted; may be empty.
    """
    if spec is None:
        spec = QuadratureSpec()
    if not weight_fns:
        raise ValueError("need at least one weight function")
    if not hi > lo:
        raise ValueError("integration window is empty")
    times = np.atleast_1d(np.asarray(times, dtype=float))

    width_cap = (hi - lo) / 16.0
    t_span = float(np.max(np.abs(times))) if times.size else 0.0
    if t_span > 0.0:
        width_cap = min(width_cap, 2.0 * np.pi / t_span / spec.panels_per_period)
    base_panels = max(16, int(np.ceil((hi - lo) / width_cap)))

    prev = _evaluate(weight_fns, lo, hi, times, base_panels, spec.nodes_per_panel)
    err = np.inf
    for level in range(1, spec.max_refinements + 1):
        cur = _evaluate(weight_fns, lo, hi, times, base_panels << level, spec.nodes_per_panel)
        err = _batch_difference(prev, cur)
        if err <= spec.rel_tolerance:
            return SpectralTransforms(cur[0], cur[1], cur[2], err, level)
        prev = cur
    raise QuadratureError(
        f"spectral integrals not converged after {spec.max_refinements} refinements "
        f"(last relative change {err:.3e}, tolerance {spec.rel_tolerance:.3e})",
        estimate=err,
    )


def spectral_integral(weight_fn, lo: float, hi: float, spec: QuadratureSpec | None = None) -> float:
    """Plain converged integral of one weight function over [lo, hi]."""
    return float(spectral_transforms([weight_fn], lo, hi, (), spec).totals[0])
