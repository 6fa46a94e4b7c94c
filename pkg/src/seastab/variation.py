"""Variation density, Euler-Lagrange residuals and state-stability tests.

The variation density V(m) is the action response to switching on a test sea
of infinitesimal weight at (possibly negative) mass m, normalized by 2 m^3:

    V(m) 2 m^3 = (4 / 2^16 pi^10) sum_b rho_b  Int_0^amax X_m(a) Y(a) da
                 + 2 c1 dm3(m) - 2 c0 dm5(m) + c3 m^4 + c4 m^5

with X_m(a) = sum_b rho_b H(a, m, m_b), Y the sea kernel sum, and

    dm3(m) = -(1/32 pi^5) sum_b rho_b (m^3 + m_b^3)
    dm5(m) =  (1/256 pi^5) sum_b rho_b (m_b - m)^2 (m_b + m)^3.

The c0/c1 couplings enter with coefficient 2 = 32 pi^4 / (2 pi)^4 so that
every term shares the quartic action's normalization.

At an occupied mass the quartic part behaves like
(m - m_b)^2 (A + B log|m - m_b|): continuous with a continuous first
derivative but no second one.  Seam values and derivatives are therefore
two-sided limits, extracted by fitting that local model to symmetric
offset pairs (the odd parts of the expansion cancel in the two-sided
average, which is what makes the extraction accurate).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .action import SEA_PREF, sea_kernel, test_kernel
from .kernels import _H_arr
from .model import SeaConfig, CouplingParams, compute_m3, compute_m5
from .quadrature import QuadSettings, integrate

PI5 = np.pi**5
V_PREF = 4.0 * SEA_PREF

C_NAMES = ("c0", "c1", "c3", "c4")


class SeamError(ValueError):
    """Test mass coincides with an occupied mass (use the seam-limit path)."""


def c_basis_value(cfg: SeaConfig, m: float) -> np.ndarray:
    """Coefficients of (c0, c1, c3, c4) in V(m); smooth across seams."""
    mb = cfg.mass_array()
    rho = cfg.weight_array()
    R = rho.sum()
    T = float(rho @ mb**3)
    P = float(rho @ ((mb - m) ** 2 * (mb + m) ** 3))
    v0 = -P / (256.0 * PI5 * m**3)
    v1 = -(R + T / m**3) / (32.0 * PI5)
    return np.array([v0, v1, 0.5 * m, 0.5 * m * m])


def c_basis_prime(cfg: SeaConfig, m: float) -> np.ndarray:
    """d/dm of the (c0, c1, c3, c4) coefficients."""
    mb = cfg.mass_array()
    rho = cfg.weight_array()
    T = float(rho @ mb**3)
    P = float(rho @ ((mb - m) ** 2 * (mb + m) ** 3))
    Pp = float(rho @ (-2.0 * (mb - m) * (mb + m) ** 3 + 3.0 * (mb - m) ** 2 * (mb + m) ** 2))
    v0p = -(Pp / m**3 - 3.0 * P / m**4) / (256.0 * PI5)
    v1p = 3.0 * T / (32.0 * PI5 * m**4)
    return np.array([v0p, v1p, 0.5, m])


def _c_vector(params: CouplingParams) -> np.ndarray:
    return np.array([params.c0, params.c1, params.c3, params.c4])


@dataclass
class ELResiduals:
    """Criticality residuals: equal V at occupied masses, V' = 0 there."""

    value_gaps: tuple
    derivative_residuals: tuple

    def norm(self) -> float:
        r = np.array(list(self.value_gaps) + list(self.derivative_residuals))
        return float(np.linalg.norm(r))

    def as_array(self) -> np.ndarray:
        return np.array(list(self.value_gaps) + list(self.derivative_residuals))


@dataclass
class StabilityReport:
    is_state_stable: bool
    violated_conditions: tuple
    margins: dict


@dataclass
class VCurve:
    """Sampled variation density with seam annotations."""

    grid: np.ndarray
    values: np.ndarray
    seam_points: tuple
    seam_values: dict
    local_minima: tuple          # (position, value) pairs on m > 0
    seam_kinds: dict = field(default_factory=dict)


class VariationEvaluator:
    """Caches the expensive quartic integrals behind V(m).

    The quartic part depends only on (masses, weights, a_max, quad): coupling
    constants enter V affinely through closed forms, so a solver exploring
    the c-directions reuses every integral.
    """

    # two-sided offsets (relative to the seam mass) for the limit fits
    VALUE_OFFSETS = (3e-3, 1e-3, 3e-4)
    PRIME_OFFSETS = (4e-3, 2e-3, 1e-3)

    def __init__(self, cfg: SeaConfig, params: CouplingParams,
                 quad: QuadSettings | None = None):
        params.validate_against(cfg)
        self.cfg = cfg
        self.params = params
        self.quad = quad or QuadSettings()
        self._Y, self._sea_kinks = sea_kernel(cfg)
        self._cache: dict = {}

    # -- quartic machinery -------------------------------------------------

    def quartic_rho_derivative(self, m: float) -> float:
        """d S_quartic / d rho_test at zero test weight, test mass m."""
        m = float(m)
        hit = self._cache.get(m)
        if hit is not None:
            return hit
        X, tkinks = test_kernel(self.cfg, m)
        value = integrate(lambda a: X(a) * self._Y(a), 0.0, self.params.a_max,
                          self.quad, points=list(self._sea_kinks) + list(tkinks))
        value *= V_PREF
        self._cache[m] = value
        return value

    def base_value(self, m: float) -> float:
        """Quartic part of V(m) (all couplings zero)."""
        return self.quartic_rho_derivative(m) / (2.0 * m**3)

    def value(self, m: float) -> float:
        return self.base_value(m) + float(c_basis_value(self.cfg, m) @ _c_vector(self.params))

    # -- seam-aware derivatives --------------------------------------------

    def _seam_distance(self, m: float) -> float:
        seams = np.array(self.cfg.masses)
        return float(min(np.min(np.abs(abs(m) - seams)), abs(m)))

    def _stencil_prime(self, f, m: float, h: float) -> float:
        return (f(m - 2 * h) - 8.0 * f(m - h) + 8.0 * f(m + h) - f(m + 2 * h)) / (12.0 * h)

    def base_prime(self, m: float, h: float | None = None) -> float:
        """d/dm of the quartic part away from seams (5-point stencil)."""
        dist = self._seam_distance(m)
        if dist <= 0.0:
            raise SeamError(f"m = {m} sits on a seam; use seam_prime")
        scale = max(abs(m), self.cfg.masses[0])
        h = h if h is not None else min(1e-3 * scale, 0.2 * dist)
        return self._stencil_prime(self.base_value, m, h)

    def _fit_seam_limit(self, samples):
        # samples: (u, two-sided average); local model L + C u^2 log u + D u^2
        A = np.array([[1.0, u * u * np.log(u), u * u] for u, _ in samples])
        b = np.array([v for _, v in samples])
        coef, *_ = np.linalg.lstsq(A, b, rcond=None)
        return float(coef[0])

    def base_seam_value(self, m_alpha: float) -> float:
        """Two-sided limit of the quartic part at a seam (|m_alpha| occupied)."""
        samples = []
        for rel in self.VALUE_OFFSETS:
            u = rel * abs(m_alpha)
            avg = 0.5 * (self.base_value(m_alpha + u) + self.base_value(m_alpha - u))
            samples.append((u, avg))
        return self._fit_seam_limit(samples)

    def base_seam_prime(self, m_alpha: float) -> float:
        """Two-sided limit of the quartic V' at a seam.

        The singular u (A + B log|u|) parts of V' are odd around the seam,
        so they drop out of the two-sided average exactly.
        """
        samples = []
        for rel in self.PRIME_OFFSETS:
            u = rel * abs(m_alpha)
            h = u / 10.0
            right = self._stencil_prime(self.base_value, m_alpha + u, h)
            left = self._stencil_prime(self.base_value, m_alpha - u, h)
            samples.append((u, 0.5 * (right + left)))
        return self._fit_seam_limit(samples)

    def seam_value(self, m_alpha: float) -> float:
        return self.base_seam_value(m_alpha) \
            + float(c_basis_value(self.cfg, m_alpha) @ _c_vector(self.params))

    def seam_prime(self, m_alpha: float) -> float:
        return self.base_seam_prime(m_alpha) \
            + float(c_basis_prime(self.cfg, m_alpha) @ _c_vector(self.params))

    def prime(self, m: float) -> float:
        return self.base_prime(m) + float(c_basis_prime(self.cfg, m) @ _c_vector(self.params))

    # -- residual system -----------------------------------------------------

    def el_base_and_matrix(self):
        """Residuals of the quartic part plus the affine coupling matrix.

        residual(c) = base + M @ (c0, c1, c3, c4); rows are the g-1 value
        gaps followed by the g derivative residuals.
        """
        masses = self.cfg.masses
        base_vals = [self.base_seam_value(m) for m in masses]
        base_primes = [self.base_seam_prime(m) for m in masses]
        rows = []
        mat = []
        for i in range(1, len(masses)):
            rows.append(base_vals[i] - base_vals[0])
            mat.append(c_basis_value(self.cfg, masses[i]) - c_basis_value(self.cfg, masses[0]))
        for i, m in enumerate(masses):
            rows.append(base_primes[i])
            mat.append(c_basis_prime(self.cfg, m))
        return np.array(rows), np.array(mat)


def _check_not_seam(cfg: SeaConfig, m: float):
    if m == 0.0:
        raise SeamError("variation density is undefined at m = 0")
    for mb in cfg.masses:
        if abs(abs(m) - mb) < 1e-12 * mb:
            raise SeamError(f"test mass {m} coincides with occupied mass {mb}")


def variation_density(m: float, cfg: SeaConfig, params: CouplingParams,
                      quad: QuadSettings | None = None) -> float:
    """V(m) for a test mass off the seams (m may be negative)."""
    _check_not_seam(cfg, m)
    return VariationEvaluator(cfg, params, quad).value(m)


def variation_density_prime(m: float, cfg: SeaConfig, params: CouplingParams,
                            quad: QuadSettings | None = None) -> float:
    """V'(m); at an occupied mass this is the two-sided limit."""
    ev = VariationEvaluator(cfg, params, quad)
    if m == 0.0:
        raise SeamError("variation density is undefined at m = 0")
    for mb in cfg.masses:
        if abs(abs(m) - mb) < 1e-12 * mb:
            seam = mb if m > 0 else -mb
            return ev.base_seam_prime(seam) \
                + float(c_basis_prime(cfg, seam) @ _c_vector(params))
    return ev.prime(m)


def el_residuals(cfg: SeaConfig, params: CouplingParams,
                 quad: QuadSettings | None = None,
                 evaluator: VariationEvaluator | None = None) -> ELResiduals:
    ev = evaluator or VariationEvaluator(cfg, params, quad)
    base, mat = ev.el_base_and_matrix()
    res = base + mat @ _c_vector(params)
    g = cfg.g
    return ELResiduals(value_gaps=tuple(res[: g - 1]),
                       derivative_residuals=tuple(res[g - 1:]))


# -- curve sampling and stability ------------------------------------------


def _parse_grid_spec(grid_spec):
    if isinstance(grid_spec, str):
        lo, hi, n = grid_spec.split(":")
        return float(lo), float(hi), int(n)
    lo, hi, n = grid_spec
    return float(lo), float(hi), int(n)


def build_grid(cfg: SeaConfig, lo: float, hi: float, n: int,
               seam_refine: bool = True) -> np.ndarray:
    """Strictly increasing grid avoiding 0 and the seams at +-m_b.

    Near-seam log-spaced clusters resolve the dips of the local
    u^2 (A + B log u) model down to relative offsets of 1e-4.
    """
    seams = [s * sgn for s in cfg.masses for sgn in (+1.0, -1.0)]
    pts = set(np.linspace(lo, hi, n))
    if seam_refine:
        offsets = np.geomspace(1e-4, 0.25, 24)
        for s in seams:
            for u in offsets:
                for p in (s * (1.0 + u), s * (1.0 - u)):
                    if lo <= p <= hi:
                        pts.add(p)
    guard_zero = 0.05 * cfg.masses[0]
    out = []
    for p in sorted(pts):
        if abs(p) < guard_zero:
            continue
        if any(abs(abs(p) - mb) < 5e-5 * mb for mb in cfg.masses):
            continue
        out.append(p)
    return np.array(out)


def _detect_minima(grid: np.ndarray, values: np.ndarray, seams) -> list:
    """Local minima on m > 0, detected per seam-bounded segment.

    A segment edge point lower than its interior neighbor marks a dip
    trapped between the grid and the seam (the local model guarantees one);
    it is reported at the edge position.
    """
    pos = grid > 0
    g = grid[pos]
    v = values[pos]
    bounds = [0.0] + sorted(seams) + [np.inf]
    minima = []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        idx = np.where((g > lo) & (g < hi))[0]
        if len(idx) < 3:
            continue
        gs, vs = g[idx], v[idx]
        for k in range(1, len(idx) - 1):
            if vs[k] < vs[k - 1] and vs[k] < vs[k + 1]:
                minima.append((float(gs[k]), float(vs[k])))
        # unresolved dips hugging a seam edge
        if lo > 0.0 and vs[0] < vs[1]:
            minima.append((float(gs[0]), float(vs[0])))
        if np.isfinite(hi) and vs[-1] < vs[-2]:
            minima.append((float(gs[-1]), float(vs[-1])))
    return sorted(minima)


def sample_vcurve(cfg: SeaConfig, params: CouplingParams, grid_spec,
                  quad: QuadSettings | None = None,
                  evaluator: VariationEvaluator | None = None) -> VCurve:
    lo, hi, n = _parse_grid_spec(grid_spec)
    ev = evaluator or VariationEvaluator(cfg, params, quad)
    grid = build_grid(cfg, lo, hi, n)
    values = np.array([ev.value(m) for m in grid])
    seam_values = {mb: ev.seam_value(mb) for mb in cfg.masses}
    minima = _detect_minima(grid, values, cfg.masses)
    kinds = {}
    for mb, sv in seam_values.items():
        probe = 1e-3 * mb
        around = (ev.value(mb - probe), ev.value(mb + probe))
        if sv > max(around):
            kinds[mb] = "max"
        elif sv < min(around):
            kinds[mb] = "min"
        else:
            kinds[mb] = "shoulder"
    return VCurve(grid=grid, values=values, seam_points=tuple(cfg.masses),
                  seam_values=seam_values, local_minima=tuple(minima),
                  seam_kinds=kinds)


def classify_stability(curve: VCurve, cfg: SeaConfig, tol: float = 0.0) -> StabilityReport:
    """Check the variation-density form of the stability conditions.

    (ii') V(m) >= V(-m) on m > 0, (iii') every occupied mass realizes the
    infimum of V over m > 0 (within tol), and a(m^2) = (V(m) - V(-m))/2 >= 0.
    Margins are signed; positive means satisfied with room.
    """
    grid = curve.grid
    values = curve.values
    top = max(cfg.masses)
    if grid[0] > -2.0 * top or grid[-1] < 2.0 * top:
        raise ValueError("curve must cover [-M, M] with M >= 2 max mass")
    pos = grid > 0
    gp, vp = grid[pos], values[pos]
    vneg = np.interp(-gp, grid, values)
    diff = vp - vneg
    margin_ii = float(diff.min())
    margin_a = 0.5 * margin_ii
    # the infimum over m > 0 includes the seam values themselves, so a seam
    # realizing the minimum scores a zero margin
    inf_pos = min(float(vp.min()), min(curve.seam_values.values()))
    margin_iii = min(inf_pos - curve.seam_values[mb] for mb in cfg.masses)
    violated = []
    if margin_ii < -tol:
        violated.append("ii_prime")
    if margin_a < -tol:
        violated.append("a_nonneg")
    if margin_iii < -tol:
        violated.append("iii_prime")
    return StabilityReport(
        is_state_stable=not violated,
        violated_conditions=tuple(violated),
        margins={"ii_prime": margin_ii, "a_nonneg": margin_a, "iii_prime": margin_iii},
    )


def gauge_compensation(cfg: SeaConfig, a_max_old: float, a_max_new: float):
    """Coupling shifts (dc0, dc1) that cancel a change of the cutoff a_max.

    Beyond every pair threshold the kernel sum carries only the two moments
    (m3, m5), so the cutoff change is exactly an (m3, m5)-linear shift of
    first variations; valid for test masses with (|m| - m_b)^2 <= a_max_old.
    """
    m3 = compute_m3(cfg)
    m5 = compute_m5(cfg)
    i0 = a_max_new - a_max_old
    i1 = np.log(a_max_new / a_max_old)
    i2 = 1.0 / a_max_old - 1.0 / a_max_new
    dc0 = 4.0 * m5 * i2 + m3 * i1
    dc1 = -m5 * i1 - 0.25 * m3 * i0
    return dc0, dc1
