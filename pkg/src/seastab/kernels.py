"""Closed-form radial kernels of the momentum-space convolution calculus.

Everything here is scalar algebra on the Lorentz-invariant variables: a is a
squared momentum, b and c squared masses, x and y (possibly negative) masses.
The discriminant factors exactly as

    Delta(a, b, c) = (a - (sqrt(b)-sqrt(c))^2) * (a - (sqrt(b)+sqrt(c))^2),

which is the numerically stable form used throughout.  Step-function
conventions: Theta(0) = 0 and eps(0) = +1, so J vanishes exactly at the
threshold a = (|x|-|y|)^2.

The combination J + K vanishes at a = 0, so H = (J + K)/a is bounded but a
naive evaluation cancels catastrophically for small a; below a relative
threshold H switches to the expansion H = a * h1(x, y) + O(a^2) with

    h1 = [2 x^2 y^2 / (x-y)^2 - (x^2+y^2)] / (x + y).

The region kernels K1/K2/L1/L2 all carry the 1/(32 pi^3) prefactor, so the
derivative identity reads literally K1 = L1 + L2 in every cone region.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

PREF = 1.0 / (32.0 * np.pi**3)


class DomainError(ValueError):
    """Kernel evaluated outside its admissible region."""


class ConeRegion(Enum):
    UPPER = "upper"       # q^2 > 0, q^0 > 0
    LOWER = "lower"       # q^2 > 0, q^0 < 0
    OUTSIDE = "outside"   # q^2 < 0

    def mirrored(self) -> "ConeRegion":
        if self is ConeRegion.UPPER:
            return ConeRegion.LOWER
        if self is ConeRegion.LOWER:
            return ConeRegion.UPPER
        return ConeRegion.OUTSIDE


def region_of(q0: float, a: float) -> ConeRegion:
    if a < 0.0:
        return ConeRegion.OUTSIDE
    if a > 0.0 and q0 > 0.0:
        return ConeRegion.UPPER
    if a > 0.0 and q0 < 0.0:
        return ConeRegion.LOWER
    raise DomainError("momentum on the mass cone (a = 0) is not classifiable")


def theta(x):
    """Heaviside step with Theta(0) = 0."""
    return np.where(np.asarray(x) > 0.0, 1.0, 0.0)


def sign_eps(x):
    """Sign function with eps(0) = +1."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def delta_fn(a, b, c):
    """Symmetric discriminant a^2 + b^2 + c^2 - 2(ab + ac + bc)."""
    a = np.asarray(a, dtype=float)
    res = a * a + b * b + c * c - 2.0 * (a * b + a * c + b * c)
    return float(res) if res.ndim == 0 else res


def _thresholds(x: float, y: float):
    ax, ay = abs(x), abs(y)
    return (ax - ay) ** 2, (ax + ay) ** 2


def _J_arr(a, x, y):
    a = np.asarray(a, dtype=float)
    t_lo, t_hi = _thresholds(x, y)
    active = a < t_lo
    disc = np.where(active, (t_lo - a) * (t_hi - a), 0.0)
    root = np.sqrt(disc)
    s = 1.0 if x * x >= y * y else -1.0
    return -root * (x - y) * s * ((x + y) ** 2 - a) * active


def _K_arr(a, x, y):
    a = np.asarray(a, dtype=float)
    return (x - y) ** 2 * (x + y) ** 3 - 2.0 * a * (x**3 + y**3)


def _sqrt_defect(u, terms=40):
    # 1 - sqrt(1-u) - u/2 = sum_{k>=2} c_k u^k, c_{k+1} = c_k (2k-1)/(2k+2);
    # convergent for |u| < 1, used for |u| <= 1/4 where 40 terms reach 1e-25
    total = np.zeros_like(u)
    ck = 0.5
    uk = np.array(u, copy=True)
    for k in range(1, terms):
        ck *= (2 * k - 1) / (2 * k + 2)
        uk = uk * u
        total += ck * uk
    return total


def _H_arr(a, x, y):
    a = np.asarray(a, dtype=float)
    if abs(x) == abs(y):
        value = -4.0 * x**3 if x == y else 0.0
        return np.full_like(a, value)
    t_lo, _ = _thresholds(x, y)
    direct = (_J_arr(a, x, y) + _K_arr(a, x, y)) / np.where(a != 0.0, a, 1.0)
    # Below the threshold J cancels K down to O(a^2); the rearrangement
    #   J + K = -a^2 (x+y)/2 + (x+y) D^2 W(u) - a (x-y) D (u/2 + W(u)),
    # with D = x^2-y^2, u = a (2S - a)/D^2, S = x^2+y^2 and
    # W(u) = 1 - sqrt(1-u) - u/2, removes every cancelling order analytically.
    D = x * x - y * y
    S = x * x + y * y
    u = a * (2.0 * S - a) / (D * D)
    small = (a < t_lo) & (u <= 0.25) & (a > 0.0)
    uc = np.where(small, u, 0.0)
    W = _sqrt_defect(uc)
    jk = (-0.5 * a * a * (x + y) + (x + y) * D * D * W
          - a * (x - y) * D * (0.5 * uc + W))
    stable = jk / np.where(a != 0.0, a, 1.0)
    return np.where(small, stable, direct)


def J_fn(a: float, x: float, y: float) -> float:
    """Off-shell pair kernel: vanishes for |x| = |y| and for a >= (|x|-|y|)^2."""
    if a < 0.0:
        raise DomainError(f"J requires a >= 0, got {a}")
    return float(_J_arr(np.float64(a), float(x), float(y)))


def K_fn(a: float, x: float, y: float) -> float:
    """Polynomial pair kernel (x-y)^2 (x+y)^3 - 2a (x^3 + y^3)."""
    return float(_K_arr(np.float64(a), float(x), float(y)))


def H_fn(a: float, x: float, y: float) -> float:
    """Bounded combination (J + K)/a, series-evaluated near a = 0."""
    if a <= 0.0:
        raise DomainError(f"H requires a > 0, got {a}")
    return float(_H_arr(np.float64(a), float(x), float(y)))


def _check_region(region: ConeRegion, a: float) -> None:
    if region is ConeRegion.OUTSIDE:
        if a >= 0.0:
            raise DomainError(f"outside-cone kernel requires a < 0, got {a}")
    else:
        if a <= 0.0:
            raise DomainError(f"inside-cone kernel requires a > 0, got {a}")


def _sqrt_delta(a, b, c):
    # stable product form; clipped so masked-off branches never produce nans
    t_lo = (np.sqrt(b) - np.sqrt(c)) ** 2
    t_hi = (np.sqrt(b) + np.sqrt(c)) ** 2
    return np.sqrt(np.maximum((a - t_lo) * (a - t_hi), 0.0))


def _support_theta(region: ConeRegion, a, b, c):
    # Theta(sqrt b - sqrt a - sqrt c) in the upper cone, b <-> c in the lower
    if region is ConeRegion.UPPER:
        return theta(np.sqrt(b) - np.sqrt(a) - np.sqrt(c))
    return theta(np.sqrt(c) - np.sqrt(a) - np.sqrt(b))


def K1_kernel(region: ConeRegion, a, b, c):
    """Scalar mixed-convolution kernel, 1/(32 pi^3) prefactor included."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        _check_region(region, float(a))
    root = _sqrt_delta(a, b, c)
    if region is ConeRegion.OUTSIDE:
        val = (root - np.abs(b - c)) / (2.0 * a)
    else:
        sup = _support_theta(region, a, b, c)
        cut = theta(b - c) if region is ConeRegion.UPPER else theta(c - b)
        val = (root * sup - np.abs(b - c) * cut) / a
    res = PREF * val
    return float(res) if res.ndim == 0 else res


def K2_kernel(region: ConeRegion, a, b, c):
    """Contracted-derivative analogue of K1 (its (b+c-a)/2 companion)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        _check_region(region, float(a))
    root = _sqrt_delta(a, b, c)
    if region is ConeRegion.OUTSIDE:
        val = (root * (b + c - a) - np.abs(b - c) * (b + c)) / (4.0 * a)
    else:
        sup = _support_theta(region, a, b, c)
        cut = theta(b - c) if region is ConeRegion.UPPER else theta(c - b)
        val = (root * (b + c - a) / 2.0 * sup - np.abs(b - c) * (b + c) / 2.0 * cut) / a
    res = PREF * val
    return float(res) if res.ndim == 0 else res


def L1_kernel(region: ConeRegion, a, b, c):
    """Left-derivative kernel: scalar coefficient of i q-slash, prefactor included."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        _check_region(region, float(a))
    root = _sqrt_delta(a, b, c)
    poly = ((b - c) ** 2 - 2.0 * a * b)
    if region is ConeRegion.OUTSIDE:
        val = root * (a - b + c) / (4.0 * a * a) + poly / (4.0 * a * a) * sign_eps(b - c)
    elif region is ConeRegion.UPPER:
        val = root * (a - b + c) / (2.0 * a * a) * _support_theta(region, a, b, c) \
            + poly / (2.0 * a * a) * theta(b - c)
    else:
        val = root * (a - b + c) / (2.0 * a * a) * _support_theta(region, a, b, c) \
            - poly / (2.0 * a * a) * theta(c - b)
    res = PREF * val
    return float(res) if res.ndim == 0 else res


def L2_kernel(region: ConeRegion, a, b, c):
    """Right-derivative kernel; satisfies L2(q, b, c) = L1(-q, c, b)."""
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        _check_region(region, float(a))
    root = _sqrt_delta(a, b, c)
    poly = ((b - c) ** 2 - 2.0 * a * c)
    if region is ConeRegion.OUTSIDE:
        val = root * (a + b - c) / (4.0 * a * a) - poly / (4.0 * a * a) * sign_eps(b - c)
    elif region is ConeRegion.UPPER:
        val = root * (a + b - c) / (2.0 * a * a) * _support_theta(region, a, b, c) \
            - poly / (2.0 * a * a) * theta(b - c)
    else:
        val = root * (a + b - c) / (2.0 * a * a) * _support_theta(region, a, b, c) \
            + poly / (2.0 * a * a) * theta(c - b)
    res = PREF * val
    return float(res) if res.ndim == 0 else res


def H_eps_kernel(q0: float, qvec_norm: float, b: float, c: float, eps: float) -> float:
    """Regularized mixed kernel outside the mass cone.

    H_eps = exp(eps |qv| sqrt(Delta)/a + eps q0 (c - b)/a) / (2 eps |qv|)
    with a = q0^2 - |qv|^2 < 0.
    """
    if eps <= 0.0:
        raise DomainError(f"eps must be > 0, got {eps}")
    if b < 0.0 or c < 0.0:
        raise DomainError("b and c must be >= 0")
    a = q0 * q0 - qvec_norm * qvec_norm
    if a >= 0.0:
        raise DomainError(f"momentum must lie outside the mass cone, got a = {a}")
    root = float(_sqrt_delta(np.float64(a), b, c))
    return float(np.exp(eps * qvec_norm * root / a + eps * q0 * (c - b) / a)
                 / (2.0 * eps * qvec_norm))
