"""Sea configurations, coupling constants and the derived scalar quantities.

A configuration is a list of generations: strictly positive masses m_beta in
canonical (non-decreasing) order with non-negative weights rho_beta.  The
scalars

    m3 = -(1/64 pi^5) sum_{a,b} rho_a rho_b (m_a^3 + m_b^3)      (<= 0)
    m5 =  (1/512 pi^5) sum_{a,b} rho_a rho_b (m_a-m_b)^2 (m_a+m_b)^3  (>= 0)
    T  =  sum_b rho_b m_b^3

control every counter term and the constraint surface.  All operations are
pure; instances are frozen and safe to share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .quadrature import QuadSettings

PI5 = np.pi**5


class ValidationError(ValueError):
    """Invalid configuration input; `key` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class SeaConfig:
    """Masses and weights of the g generations."""

    masses: tuple
    weights: tuple

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "weights", weights)
        if len(masses) == 0:
            raise ValidationError("masses", "at least one generation required")
        if len(masses) != len(weights):
            raise ValidationError(
                "weights", f"length {len(weights)} does not match masses length {len(masses)}"
            )
        for i, m in enumerate(masses):
            if not np.isfinite(m) or m <= 0.0:
                raise ValidationError(f"masses[{i}]", f"must be finite and > 0, got {m}")
        for i in range(1, len(masses)):
            if masses[i] < masses[i - 1]:
                raise ValidationError(
                    f"masses[{i}]", "masses must be in non-decreasing order"
                )
        for i, w in enumerate(weights):
            if not np.isfinite(w) or w < 0.0:
                raise ValidationError(f"weights[{i}]", f"must be finite and >= 0, got {w}")

    @property
    def g(self) -> int:
        return len(self.masses)

    @property
    def max_mass(self) -> float:
        return self.masses[-1]

    def mass_array(self) -> np.ndarray:
        return np.asarray(self.masses, dtype=float)

    def weight_array(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def replace(self, masses=None, weights=None) -> "SeaConfig":
        return SeaConfig(
            masses=self.masses if masses is None else tuple(masses),
            weights=self.weights if weights is None else tuple(weights),
        )


@dataclass(frozen=True)
class CouplingParams:
    """Free constants of the extended action plus the integration cutoff.

    c0 and c1 shift the first variation through the derivatives of m5 and m3
    respectively (they never enter the reported action value); c3 and c4 add
    the polynomial terms c3 sum rho m^4 + c4 sum rho m^5.  a_max must lie
    above every occupied m^2.
    """

    c0: float = 0.0
    c1: float = 0.0
    c3: float = 0.0
    c4: float = 0.0
    a_max: float = 1.0

    def __post_init__(self):
        for name in ("c0", "c1", "c3", "c4", "a_max"):
            v = float(getattr(self, name))
            if not np.isfinite(v):
                raise ValidationError(name, f"must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.a_max <= 0.0:
            raise ValidationError("a_max", f"must be > 0, got {self.a_max}")

    def validate_against(self, cfg: SeaConfig) -> None:
        top = cfg.max_mass**2
        if self.a_max <= top:
            raise ValidationError(
                "a_max", f"must exceed max mass squared {top}, got {self.a_max}"
            )

    def replace(self, **kw) -> "CouplingParams":
        vals = dict(c0=self.c0, c1=self.c1, c3=self.c3, c4=self.c4, a_max=self.a_max)
        vals.update(kw)
        return CouplingParams(**vals)


@dataclass(frozen=True)
class DerivedScalars:
    m3: float
    m5: float
    T: float


def compute_m3(cfg: SeaConfig) -> float:
    """Light-cone pole coefficient of mass dimension three (always <= 0)."""
    m = cfg.mass_array()
    rho = cfg.weight_array()
    cubes = rho @ m**3
    total = 2.0 * rho.sum() * cubes  # sum_{a,b} rho_a rho_b (m_a^3 + m_b^3)
    return -total / (64.0 * PI5)


def compute_m5(cfg: SeaConfig) -> float:
    """Light-cone pole coefficient of mass dimension five (always >= 0)."""
    m = cfg.mass_array()
    rho = cfg.weight_array()
    diff = m[:, None] - m[None, :]
    summ = m[:, None] + m[None, :]
    total = float(np.einsum("i,j,ij->", rho, rho, diff**2 * summ**3))
    return total / (512.0 * PI5)


def compute_constraint_T(cfg: SeaConfig) -> float:
    """Mass-weighted normalization sum rho_b m_b^3."""
    return float(cfg.weight_array() @ cfg.mass_array() ** 3)


def derived_scalars(cfg: SeaConfig) -> DerivedScalars:
    return DerivedScalars(m3=compute_m3(cfg), m5=compute_m5(cfg), T=compute_constraint_T(cfg))


def normalize_gauge(cfg: SeaConfig):
    """Rescale so the first generation sits at m1 = 1 with rho1 = 1.

    Returns the rescaled config together with the mass scale lambda and the
    weight scale mu that were divided out; `denormalize_gauge` inverts the
    map exactly.
    """
    if cfg.weights[0] <= 0.0:
        raise ValidationError("weights[0]", "gauge undefined for rho1 = 0")
    lam = cfg.masses[0]
    mu = cfg.weights[0]
    new = SeaConfig(
        masses=tuple(m / lam for m in cfg.masses),
        weights=tuple(w / mu for w in cfg.weights),
    )
    return new, lam, mu


def denormalize_gauge(cfg: SeaConfig, lam: float, mu: float) -> SeaConfig:
    return SeaConfig(
        masses=tuple(m * lam for m in cfg.masses),
        weights=tuple(w * mu for w in cfg.weights),
    )


def default_a_max(cfg: SeaConfig) -> float:
    return 1.5 * cfg.max_mass**2


@dataclass(frozen=True)
class LoadedConfig:
    cfg: SeaConfig
    params: CouplingParams
    quad: QuadSettings
    defaults_applied: dict


def _require_number(doc: dict, key: str, default=None):
    if key not in doc:
        if default is None:
            raise ValidationError(key, "missing required key")
        return default, True
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(key, f"expected a number, got {value!r}")
    return float(value), False


def load_config(source) -> LoadedConfig:
    """Parse a config JSON document (path, JSON string, or dict).

    Schema: {"masses": [...], "weights": [...], "c0", "c1", "c3", "c4",
    "a_max", "quad_tol", "max_subdiv"}; the c's default to 0, a_max to
    1.5 * max(m)^2, quadrature settings to their defaults.  Every applied
    default is recorded.
    """
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        with open(source, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    elif isinstance(source, str):
        doc = json.loads(source)
    else:
        doc = dict(source)
    if not isinstance(doc, dict):
        raise ValidationError("<root>", "config document must be a JSON object")

    for key in ("masses", "weights"):
        if key not in doc:
            raise ValidationError(key, "missing required key")
        if not isinstance(doc[key], (list, tuple)):
            raise ValidationError(key, "expected an array of numbers")
        for i, v in enumerate(doc[key]):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ValidationError(f"{key}[{i}]", f"expected a number, got {v!r}")
    cfg = SeaConfig(masses=tuple(doc["masses"]), weights=tuple(doc["weights"]))

    defaults = {}
    c_values = {}
    for key in ("c0", "c1", "c3", "c4"):
        value, used_default = _require_number(doc, key, default=0.0)
        c_values[key] = value
        if used_default:
            defaults[key] = value
    if "a_max" in doc:
        a_max, _ = _require_number(doc, "a_max")
    else:
        a_max = default_a_max(cfg)
        defaults["a_max"] = a_max
    params = CouplingParams(a_max=a_max, **c_values)
    params.validate_against(cfg)

    quad_tol, d1 = _require_number(doc, "quad_tol", default=QuadSettings().quad_tol)
    max_subdiv, d2 = _require_number(doc, "max_subdiv", default=float(QuadSettings().max_subdiv))
    if d1:
        defaults["quad_tol"] = quad_tol
    if d2:
        defaults["max_subdiv"] = int(max_subdiv)
    quad = QuadSettings(quad_tol=quad_tol, max_subdiv=int(max_subdiv))

    known = {"masses", "weights", "c0", "c1", "c3", "c4", "a_max", "quad_tol", "max_subdiv"}
    for key in doc:
        if key not in known:
            raise ValidationError(key, "unknown key")
    return LoadedConfig(cfg=cfg, params=params, quad=quad, defaults_applied=defaults)
