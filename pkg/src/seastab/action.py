"""Momentum-space evaluation of the quartic, extended and regularized actions.

The quartic action is the L^2 pairing of the summed pair kernel

    Y(a) = sum_{ab} rho_a rho_b H(a, m_a, m_b)

with itself over [0, a_max], carrying the overall 1/(2^16 pi^10).  Beyond
a_max every J contribution has switched off and the kernel sum collapses to
the two-moment tail 512 pi^5 m5 / a + 128 pi^5 m3, which is what makes the
a_max freedom a pure reparametrization.

The regularized action keeps the smooth momentum cutoff exp(-eps a / 2) on
the m3 pole, integrates [0, a_max] numerically, adds the closed-form tail
(exponential integral plus power terms) and subtracts the counter terms
m3^2/eps and the m3*m5 logarithm, leaving a quantity with a finite limit as
eps -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import _H_arr
from .model import SeaConfig, CouplingParams, compute_m3, compute_m5, default_a_max
from .quadrature import QuadSettings, integrate, simpson
from .special import exp1

SEA_PREF = 1.0 / (2.0**16 * np.pi**10)
_TAIL_PREF = 4.0 * np.pi**4


def _pair_kink(x: float, y: float) -> float:
    return (abs(x) - abs(y)) ** 2


def sea_kernel(cfg: SeaConfig):
    """Vectorized Y(a) plus its kink locations (pair thresholds)."""
    m = cfg.masses
    rho = cfg.weights
    terms = []
    kinks = set()
    for i in range(cfg.g):
        for j in range(i, cfg.g):
            w = rho[i] * rho[j] * (1.0 if i == j else 2.0)
            if w == 0.0:
                continue
            terms.append((w, m[i], m[j]))
            kinks.add(_pair_kink(m[i], m[j]))

    def Y(a):
        a = np.asarray(a, dtype=float)
        total = np.zeros_like(a)
        for w, x, y in terms:
            total += w * _H_arr(a, x, y)
        return total

    return Y, sorted(k for k in kinks if k > 0.0)


def test_kernel(cfg: SeaConfig, m_test: float):
    """X(a) = sum_b rho_b H(a, m_test, m_b) for a (possibly negative) test mass."""
    terms = [(rho, m_test, m) for rho, m in zip(cfg.weights, cfg.masses) if rho != 0.0]
    kinks = sorted({_pair_kink(m_test, m) for _, _, m in terms if _pair_kink(m_test, m) > 0.0})

    def X(a):
        a = np.asarray(a, dtype=float)
        total = np.zeros_like(a)
        for w, x, y in terms:
            total += w * _H_arr(a, x, y)
        return total

    return X, kinks


def pair_integral(x, y, u, v, a_max, quad: QuadSettings | None = None) -> float:
    """G(x, y; u, v) = integral of H(a,x,y) H(a,u,v) over [0, a_max]."""
    if a_max <= 0.0:
        raise ValueError(f"a_max must be > 0, got {a_max}")
    quad = quad or QuadSettings()
    kinks = [_pair_kink(x, y), _pair_kink(u, v)]

    def f(a):
        return _H_arr(a, x, y) * _H_arr(a, u, v)

    return integrate(f, 0.0, a_max, quad, points=kinks)


def pair_integral_simpson(x, y, u, v, a_max, n=8192) -> float:
    """Fixed-grid Simpson version of pair_integral (cross-check path)."""
    kinks = [_pair_kink(x, y), _pair_kink(u, v)]

    def f(a):
        return _H_arr(a, x, y) * _H_arr(a, u, v)

    return simpson(f, 0.0, a_max, n=n, points=kinks)


def _pair_key(x: float, y: float):
    return (x, y) if x <= y else (y, x)


@dataclass
class PairIntegralTable:
    """Deduplicated table of pair integrals for one mass set.

    One canonical evaluation per symmetry orbit; lookups resolve through the
    (x,y) <-> (y,x) and (x,y;u,v) <-> (u,v;x,y) symmetries exactly.
    """

    a_max: float
    quad: QuadSettings
    entries: dict = field(default_factory=dict)

    def get(self, x, y, u, v) -> float:
        key = tuple(sorted((_pair_key(x, y), _pair_key(u, v))))
        value = self.entries.get(key)
        if value is None:
            value = pair_integral(x, y, u, v, self.a_max, self.quad)
            self.entries[key] = value
        return value


def build_pair_table(cfg: SeaConfig, a_max: float, quad: QuadSettings | None = None,
                     extra_masses=()) -> PairIntegralTable:
    quad = quad or QuadSettings()
    table = PairIntegralTable(a_max=a_max, quad=quad)
    masses = list(cfg.masses) + list(extra_masses)
    pairs = [(x, y) for i, x in enumerate(masses) for y in masses[i:]]
    for i, (x, y) in enumerate(pairs):
        for u, v in pairs[i:]:
            table.get(x, y, u, v)
    return table


def action_quartic(cfg: SeaConfig, a_max: float, quad: QuadSettings | None = None) -> float:
    """Quartic sea action (1/2^16 pi^10) integral of Y(a)^2 over [0, a_max]."""
    quad = quad or QuadSettings()
    if a_max <= cfg.max_mass**2:
        raise ValueError(f"a_max must exceed max mass squared, got {a_max}")
    Y, kinks = sea_kernel(cfg)
    value = integrate(lambda a: Y(a) ** 2, 0.0, a_max, quad, points=kinks)
    return SEA_PREF * value


def action_quartic_from_table(cfg: SeaConfig, table: PairIntegralTable) -> float:
    """Same action assembled from an explicit pair-integral table."""
    total = 0.0
    m = cfg.masses
    rho = cfg.weights
    for i in range(cfg.g):
        for j in range(cfg.g):
            for k in range(cfg.g):
                for l in range(cfg.g):
                    w = rho[i] * rho[j] * rho[k] * rho[l]
                    if w != 0.0:
                        total += w * table.get(m[i], m[j], m[k], m[l])
    return SEA_PREF * total


def gram_matrix(cfg: SeaConfig, a_max: float, quad: QuadSettings | None = None) -> np.ndarray:
    """Gram matrix of the pair kernels H(., m_i, m_j) over ordered pairs."""
    quad = quad or QuadSettings()
    m = cfg.masses
    pairs = [(x, y) for x in m for y in m]
    n = len(pairs)
    G = np.empty((n, n))
    table = PairIntegralTable(a_max=a_max, quad=quad)
    for i, (x, y) in enumerate(pairs):
        for j in range(i, n):
            u, v = pairs[j]
            G[i, j] = G[j, i] = table.get(x, y, u, v)
    return G


def extension_terms(cfg: SeaConfig, params: CouplingParams) -> float:
    m = cfg.mass_array()
    rho = cfg.weight_array()
    return params.c3 * float(rho @ m**4) + params.c4 * float(rho @ m**5)


def action_extended(cfg: SeaConfig, params: CouplingParams,
                    quad: QuadSettings | None = None) -> float:
    """Extended action: quartic part plus c3 sum rho m^4 + c4 sum rho m^5.

    c0 and c1 shift first variations only and never enter the reported
    value (the free counter-term function is fixed to zero).
    """
    params.validate_against(cfg)
    return action_quartic(cfg, params.a_max, quad) + extension_terms(cfg, params)


def action_extended_with_test(cfg: SeaConfig, params: CouplingParams,
                              quad: QuadSettings | None, m_test: float,
                              rho_test: float) -> float:
    """Extended action of the configuration augmented by a test sea.

    The test mass may be negative and the test weight may be negative (the
    augmented kernel sum is plain algebra); this is the independent route
    that the finite-difference oracle differentiates.
    """
    quad = quad or QuadSettings()
    params.validate_against(cfg)
    Y, kinks = sea_kernel(cfg)
    X, tkinks = test_kernel(cfg, m_test)

    def Yaug(a):
        return Y(a) + 2.0 * rho_test * X(a) + rho_test**2 * _H_arr(a, m_test, m_test)

    value = integrate(lambda a: Yaug(a) ** 2, 0.0, params.a_max, quad,
                      points=list(kinks) + list(tkinks))
    poly = extension_terms(cfg, params) \
        + params.c3 * rho_test * m_test**4 + params.c4 * rho_test * m_test**5
    return SEA_PREF * value + poly


def regularized_action(cfg: SeaConfig, eps: float, quad: QuadSettings | None = None,
                       a_max: float | None = None) -> float:
    """Smooth-cutoff action with counter terms removed.

    Head integral over [0, a_max] of ((1/64 pi^3) Y(a) + 2 pi^2 m3
    (exp(-eps a/2) - 1))^2, plus the closed-form tail of the two-moment
    asymptotic kernel, minus the counter terms 4 pi^4 m3^2/eps and the
    m3*m5 logarithm; everything divided by (2 pi)^4.  The value is
    independent of the a_max split point and converges as eps -> 0.

    Note the sign of the logarithmic counter term: consistency with the
    position-space subtraction (and the requirement that the limit exist)
    fixes it to +32 pi^4 m3 m5 log(eps).
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be > 0, got {eps}")
    quad = quad or QuadSettings()
    a_max = a_max if a_max is not None else default_a_max(cfg)
    if a_max <= cfg.max_mass**2:
        raise ValueError(f"a_max must exceed max mass squared, got {a_max}")
    m3 = compute_m3(cfg)
    m5 = compute_m5(cfg)
    Y, kinks = sea_kernel(cfg)
    zpref = 1.0 / (64.0 * np.pi**3)
    reg = 2.0 * np.pi**2 * m3

    def head_integrand(a):
        return (zpref * Y(a) + reg * np.expm1(-0.5 * eps * a)) ** 2

    head = integrate(head_integrand, 0.0, a_max, quad, points=kinks)

    # tail of the asymptotic kernel combined with the counter terms:
    # m3^2 (e^{-eps a_max} - 1)/eps -> -m3^2 a_max,
    # 8 m3 m5 (E1(eps a_max/2) + log eps) -> 8 m3 m5 (-gamma - log(a_max/2)).
    tail = m3**2 * np.expm1(-eps * a_max) / eps + 16.0 * m5**2 / a_max
    if m3 != 0.0 and m5 != 0.0:
        tail += 8.0 * m3 * m5 * (exp1(0.5 * eps * a_max) + np.log(eps))
    return (head + _TAIL_PREF * tail) / (2.0 * np.pi) ** 4
