"""Adaptive Gauss-Kronrod quadrature with kink-aware subdivision.

The action integrands are bounded but only piecewise smooth: the radial
kernels switch branches at mass-pair thresholds, so those points are fed in
as mandatory panel boundaries.  A 7/15 Gauss-Kronrod pair supplies the
per-panel error estimate; the worst panel is bisected until the summed
estimate drops below the absolute tolerance.  Since none of the Kronrod
abscissae sit on a panel edge, the integrand is never sampled at an
endpoint.

A fixed-grid composite Simpson rule is kept alongside as an independent
cross-check path; it shares nothing with the adaptive code but the panel
splitting at kinks.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

# 15-point Kronrod abscissae (positive half) and weights, with the embedded
# 7-point Gauss weights.  Standard QUADPACK dqk15 constants.
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
])
_WG = np.array([
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])          # 15 ascending nodes
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])              # Kronrod weights
_WG_FULL = np.zeros(15)
_WG_FULL[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])   # Gauss weights on shared nodes


@dataclass(frozen=True)
class QuadSettings:
    """Integration controls exposed through the config JSON.

    quad_tol is the absolute error target; quad_rel caps the refinement for
    large-magnitude integrals (effective target quad_tol + quad_rel * |I|).
    """

    quad_tol: float = 1e-10
    max_subdiv: int = 512
    quad_rel: float = 1e-12

    def tightened(self, factor: float = 10.0) -> "QuadSettings":
        return QuadSettings(quad_tol=self.quad_tol / factor,
                            max_subdiv=2 * self.max_subdiv,
                            quad_rel=self.quad_rel / factor)


class IntegrationError(RuntimeError):
    """Adaptive refinement hit the subdivision cap before reaching tolerance."""

    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error estimate {achieved_error:.3e})")
        self.achieved_error = achieved_error


def _panel(f, lo, hi):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    fx = np.asarray(f(mid + half * _NODES), dtype=float)
    k15 = half * float(fx @ _WK)
    g7 = half * float(fx @ _WG_FULL)
    return k15, abs(k15 - g7)


def _initial_edges(lo, hi, points):
    cuts = sorted({float(p) for p in points if lo < p < hi})
    return [lo, *cuts, hi]


def integrate(f, lo, hi, settings: QuadSettings | None = None, points=()):
    """Integrate a vectorized callable over [lo, hi].

    `points` are mandatory subdivision nodes (branch switches of the
    integrand).  Raises IntegrationError when the subdivision cap is hit
    with the summed error estimate still above `quad_tol`.
    """
    settings = settings or QuadSettings()
    lo = float(lo)
    hi = float(hi)
    if hi <= lo:
        return 0.0
    edges = _initial_edges(lo, hi, points)
    heap = []
    total = 0.0
    total_err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, a, b)
        total += val
        total_err += err
        heapq.heappush(heap, (-err, a, b, val, err))
    n_panels = len(heap)
    width_floor = 1e-15 * (hi - lo)

    def target():
        return settings.quad_tol + settings.quad_rel * abs(total)

    while total_err > target() and n_panels < settings.max_subdiv:
        neg_err, a, b, val, err = heapq.heappop(heap)
        if b - a < width_floor:
            # panel no longer refinable; keep its estimate and move on
            heapq.heappush(heap, (0.0, a, b, val, err))
            if all(item[0] == 0.0 for item in heap):
                break
            continue
        mid = 0.5 * (a + b)
        v1, e1 = _panel(f, a, mid)
        v2, e2 = _panel(f, mid, b)
        total += (v1 + v2) - val
        total_err += (e1 + e2) - err
        heapq.heappush(heap, (-e1, a, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, b, v2, e2))
        n_panels += 1
    if total_err > settings.quad_tol:
        raise IntegrationError("quadrature did not converge", total_err)
    return total


def simpson(f, lo, hi, n=4096, points=()):
    """Composite Simpson on a fixed grid, split at the mandatory points.

    Independent of the adaptive path; used as a cross-check oracle only.
    """
    lo = float(lo)
    hi = float(hi)
    if hi <= lo:
        return 0.0
    edges = _initial_edges(lo, hi, points)
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        m = max(8, int(np.ceil(n * (b - a) / (hi - lo))))
        if m % 2:
            m += 1
        x = np.linspace(a, b, m + 1)
        y = np.asarray(f(x), dtype=float)
        h = (b - a) / m
        total += h / 3.0 * (y[0] + y[-1] + 4.0 * y[1:-1:2].sum() + 2.0 * y[2:-1:2].sum())
    return total


def gauss_legendre_nodes(n: int, lo: float, hi: float):
    """Nodes and weights of an n-point Gauss-Legendre rule on [lo, hi]."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (hi - lo)
    return 0.5 * (lo + hi) + half * x, half * w
