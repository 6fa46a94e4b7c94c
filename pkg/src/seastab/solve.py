"""Critical-point search and constrained minimization.

Criticality means equal variation density at every occupied mass and a
vanishing seam derivative there.  The residuals are affine in the coupling
constants, so the solver separates variables: for each trial point in the
nonlinear directions (masses, weights) the free couplings are eliminated by
a minimum-norm least-squares solve against the analytic coupling matrix, and
a damped least-squares iteration runs over whatever is left.  Multi-start
plus deduplication turns this into an "all roots in the box" search.

The minimizer path works on the extended action directly with the
constraint sum rho m^3 = 1 handled either by eliminating rho1 or by a
quadratic penalty, using a deterministic Nelder-Mead simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .action import action_extended
from .model import SeaConfig, CouplingParams, compute_constraint_T
from .quadrature import QuadSettings
from .variation import (
    C_NAMES,
    ELResiduals,
    StabilityReport,
    VariationEvaluator,
    classify_stability,
    el_residuals,
    sample_vcurve,
)

DEFAULT_BOUNDS = {
    "mass": (1e-2, 1e2),
    "weight": (0.0, 1e2),
    "coupling": (-1e10, 1e10),
}


class NonConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolveProblem:
    """Free-variable specification over a base configuration.

    Variable names: "m2".."mg", "rho2".."rhog", "c0", "c1", "c3", "c4".
    The gauge slots m1 and rho1 are never free; in Minimize mode rho1 is
    instead eliminated through the constraint T = 1 (or penalized).
    """

    cfg: SeaConfig
    params: CouplingParams
    free: tuple
    mode: str = "critical"            # "critical" | "minimize"
    bounds: dict = field(default_factory=dict)
    seed: int = 0
    n_starts: int = 1
    constraint_mode: str = "eliminate"  # minimize only: "eliminate" | "penalty"
    penalty_weight: float = 1e6

    def __post_init__(self):
        if self.mode not in ("critical", "minimize"):
            raise ValueError(f"unknown mode {self.mode!r}")
        for name in self.free:
            self._var_kind(name)
        if self.mode == "minimize":
            for name in self.free:
                if name in ("c0", "c1"):
                    raise ValueError(f"{name} does not enter the action value")

    def _var_kind(self, name: str) -> str:
        if name in C_NAMES:
            return "coupling"
        if name.startswith("m") and name[1:].isdigit():
            idx = int(name[1:])
            if 2 <= idx <= self.cfg.g:
                return "mass"
        if name.startswith("rho") and name[3:].isdigit():
            idx = int(name[3:])
            if 2 <= idx <= self.cfg.g:
                return "weight"
        raise ValueError(f"unknown or gauge-fixed variable {name!r}")

    def bound_for(self, name: str):
        if name in self.bounds:
            return tuple(self.bounds[name])
        return DEFAULT_BOUNDS[self._var_kind(name)]

    def base_value(self, name: str) -> float:
        if name in C_NAMES:
            return getattr(self.params, name)
        idx = int(name.lstrip("rhom")) - 1 if name.startswith("rho") else int(name[1:]) - 1
        if name.startswith("rho"):
            return self.cfg.weights[idx]
        return self.cfg.masses[idx]

    def apply(self, values: dict) -> tuple:
        """Return (cfg, params) with the named variables replaced."""
        masses = list(self.cfg.masses)
        weights = list(self.cfg.weights)
        cp = {}
        for name, value in values.items():
            if name in C_NAMES:
                cp[name] = float(value)
            elif name.startswith("rho"):
                weights[int(name[3:]) - 1] = float(value)
            else:
                masses[int(name[1:]) - 1] = float(value)
        cfg = SeaConfig(tuple(masses), tuple(weights))
        params = self.params.replace(**cp) if cp else self.params
        return cfg, params


@dataclass
class SolutionRecord:
    cfg: SeaConfig
    params: CouplingParams
    residuals: ELResiduals
    residual_norm: float
    converged: bool
    iterations: int
    start_index: int
    stability: StabilityReport | None = None
    mode: str = "critical"
    objective: float | None = None

    def to_json_dict(self) -> dict:
        out = {
            "mode": self.mode,
            "masses": list(self.cfg.masses),
            "weights": list(self.cfg.weights),
            "c0": self.params.c0,
            "c1": self.params.c1,
            "c3": self.params.c3,
            "c4": self.params.c4,
            "a_max": self.params.a_max,
            "residual_norm": self.residual_norm,
            "value_gaps": list(self.residuals.value_gaps),
            "derivative_residuals": list(self.residuals.derivative_residuals),
            "converged": self.converged,
            "iterations": self.iterations,
            "start_index": self.start_index,
        }
        if self.objective is not None:
            out["objective"] = self.objective
        if self.stability is not None:
            out["stability"] = {
                "is_state_stable": self.stability.is_state_stable,
                "violated_conditions": list(self.stability.violated_conditions),
                "margins": dict(self.stability.margins),
            }
        return out


def fd_jacobian(fun, x, r0, rel_step=1e-6, abs_floor=1e-9):
    n = len(x)
    J = np.empty((len(r0), n))
    for j in range(n):
        h = rel_step * max(abs(x[j]), abs_floor / rel_step * 0.0 + 1e-3)
        xp = x.copy()
        xp[j] += h
        J[:, j] = (fun(xp) - r0) / h
    return J


def levenberg_marquardt(fun, x0, lower, upper, rtol=1e-10, max_iter=60):
    """Damped least squares with box projection on the step.

    `fun` returns the (scaled) residual vector.  Returns (x, r, converged,
    iterations).
    """
    x = np.clip(np.asarray(x0, dtype=float), lower, upper)
    r = fun(x)
    cost = float(r @ r)
    lam = 1e-3
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(r)) < rtol:
            return x, r, True, it
        J = fd_jacobian(fun, x, r)
        jtj = J.T @ J
        g = J.T @ r
        if np.max(np.abs(g)) < 1e-16:
            break
        improved = False
        for _ in range(14):
            A = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-14))
            try:
                step = np.linalg.solve(A, -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            xn = np.clip(x + step, lower, upper)
            rn = fun(xn)
            cn = float(rn @ rn)
            if cn < cost:
                rel_step = np.max(np.abs(xn - x) / np.maximum(np.abs(x), 1e-12))
                x, r, cost = xn, rn, cn
                lam = max(lam / 3.0, 1e-12)
                improved = True
                if rel_step < 1e-13:
                    return x, r, bool(np.max(np.abs(r)) < rtol * 10.0), it
                break
            lam *= 4.0
        if not improved:
            break
    return x, r, bool(np.max(np.abs(r)) < rtol), it


def _residual_system(problem: SolveProblem, nl_names, c_free, values_nl, quad):
    """Base residual and free-coupling matrix at a nonlinear trial point."""
    updates = dict(zip(nl_names, values_nl))
    cfg, params = problem.apply(updates)
    ev = VariationEvaluator(cfg, params, quad)
    base, mat = ev.el_base_and_matrix()
    # fold pinned couplings into the base
    pinned = np.array([getattr(params, n) if n not in c_free else 0.0 for n in C_NAMES])
    base = base + mat @ pinned
    cols = mat[:, [C_NAMES.index(n) for n in c_free]] if c_free else np.zeros((len(base), 0))
    return cfg, params, base, cols


def solve_critical(problem: SolveProblem, quad: QuadSettings | None = None,
                   rtol: float = 1e-9, dedup_tol: float = 1e-4,
                   with_stability: bool = False, curve_span: float = 2.5,
                   max_iter: int = 60):
    """All distinct criticality roots reachable from the seeded starts.

    Residuals are scaled by the quartic magnitude at the base point so the
    convergence test is relative; records carry the unscaled residuals.
    """
    quad = quad or QuadSettings()
    nl_names = tuple(n for n in problem.free if n not in C_NAMES)
    c_free = tuple(n for n in problem.free if n in C_NAMES)
    if problem.mode != "critical":
        raise ValueError("solve_critical requires mode='critical'")

    scale_ref = None

    def assemble(values_nl):
        nonlocal scale_ref
        cfg, params, base, cols = _residual_system(problem, nl_names, c_free, values_nl, quad)
        if scale_ref is None:
            scale_ref = max(float(np.max(np.abs(base))), 1e-300)
        if c_free:
            c_star, *_ = np.linalg.lstsq(cols, -base, rcond=1e-10)
            lo = np.array([problem.bound_for(n)[0] for n in c_free])
            hi = np.array([problem.bound_for(n)[1] for n in c_free])
            c_star = np.clip(c_star, lo, hi)
            resid = base + cols @ c_star
            params = params.replace(**dict(zip(c_free, c_star)))
        else:
            resid = base
        return cfg, params, resid

    rng = np.random.default_rng(problem.seed)
    base_nl = np.array([problem.base_value(n) for n in nl_names])
    lower = np.array([problem.bound_for(n)[0] for n in nl_names])
    upper = np.array([problem.bound_for(n)[1] for n in nl_names])
    starts = [base_nl]
    for _ in range(max(0, problem.n_starts - 1)):
        jitter = np.array([
            v * np.exp(rng.normal(0.0, 1.0)) if problem._var_kind(n) == "weight" and v > 0
            else v * (1.0 + 0.3 * rng.normal())
            for n, v in zip(nl_names, base_nl)
        ])
        starts.append(np.clip(jitter, lower, upper))

    records = []
    for si, x0 in enumerate(starts):
        if nl_names:
            def scaled(x):
                return assemble(x)[2] / scale_ref
            x, r, ok, it = levenberg_marquardt(scaled, x0, lower, upper,
                                               rtol=rtol, max_iter=max_iter)
            cfg, params, resid = assemble(x)
        else:
            cfg, params, resid = assemble(np.array([]))
            ok = bool(np.max(np.abs(resid)) < rtol * scale_ref)
            it = 1
        ev = VariationEvaluator(cfg, params, quad)
        el = el_residuals(cfg, params, quad, evaluator=ev)
        rec = SolutionRecord(cfg=cfg, params=params, residuals=el,
                             residual_norm=el.norm(), converged=ok,
                             iterations=it, start_index=si)
        if with_stability and ok:
            top = cfg.max_mass
            curve = sample_vcurve(cfg, params, (-curve_span * top, curve_span * top, 201),
                                  quad, evaluator=ev)
            rec.stability = classify_stability(curve, cfg,
                                               tol=1e-6 * float(np.max(np.abs(curve.values))))
        records.append(rec)

    # deduplicate converged roots by relative parameter distance
    unique = []
    for rec in sorted(records, key=lambda r: r.residual_norm):
        if not rec.converged:
            unique.append(rec)
            continue
        vec = np.array(list(rec.cfg.masses) + list(rec.cfg.weights)
                       + [rec.params.c0, rec.params.c1, rec.params.c3, rec.params.c4])
        dup = False
        for kept in unique:
            if not kept.converged:
                continue
            ref = np.array(list(kept.cfg.masses) + list(kept.cfg.weights)
                           + [kept.params.c0, kept.params.c1, kept.params.c3, kept.params.c4])
            if np.max(np.abs(vec - ref) / np.maximum(np.abs(ref), 1.0)) < dedup_tol:
                dup = True
                break
        if not dup:
            unique.append(rec)
    return unique


def _nelder_mead(f, x0, lower, upper, max_iter=400, xtol=1e-10, ftol=1e-14):
    n = len(x0)
    x0 = np.clip(np.asarray(x0, dtype=float), lower, upper)
    simplex = [x0]
    for j in range(n):
        step = 0.05 * max(abs(x0[j]), 0.1)
        xp = x0.copy()
        xp[j] = np.clip(xp[j] + step, lower[j], upper[j])
        if xp[j] == x0[j]:
            xp[j] = np.clip(x0[j] - step, lower[j], upper[j])
        simplex.append(xp)
    simplex = np.array(simplex)
    fvals = np.array([f(x) for x in simplex])
    it = 0
    for it in range(1, max_iter + 1):
        order = np.argsort(fvals)
        simplex, fvals = simplex[order], fvals[order]
        if np.max(np.abs(simplex[1:] - simplex[0])) < xtol * (1.0 + np.max(np.abs(simplex[0]))) \
                and np.max(np.abs(fvals[1:] - fvals[0])) < ftol * (1.0 + abs(fvals[0])):
            break
        centroid = simplex[:-1].mean(axis=0)
        xr = np.clip(centroid + (centroid - simplex[-1]), lower, upper)
        fr = f(xr)
        if fr < fvals[0]:
            xe = np.clip(centroid + 2.0 * (centroid - simplex[-1]), lower, upper)
            fe = f(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            xc = np.clip(centroid + 0.5 * (simplex[-1] - centroid), lower, upper)
            fc = f(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
            else:
                for j in range(1, n + 1):
                    simplex[j] = simplex[0] + 0.5 * (simplex[j] - simplex[0])
                    fvals[j] = f(simplex[j])
    best = int(np.argmin(fvals))
    return simplex[best], fvals[best], it


def minimize_action(problem: SolveProblem, quad: QuadSettings | None = None,
                    max_iter: int = 400):
    """Minimize the extended action under the mass-weighted constraint.

    With constraint_mode="eliminate", rho1 is solved from T = 1 given the
    other weights (infeasible trial points are rejected with a barrier);
    "penalty" adds penalty_weight * (T - 1)^2 instead.  Returns the best
    record over the seeded starts, with first-order conditions re-checked
    through the criticality residuals.
    """
    quad = quad or QuadSettings()
    if problem.mode != "minimize":
        raise ValueError("minimize_action requires mode='minimize'")
    names = tuple(problem.free)
    eliminate = problem.constraint_mode == "eliminate"

    def build(values):
        cfg, params = problem.apply(dict(zip(names, values)))
        if eliminate:
            weights = list(cfg.weights)
            rest = sum(w * m**3 for w, m in zip(weights[1:], cfg.masses[1:]))
            w1 = (1.0 - rest) / cfg.masses[0] ** 3
            if w1 < 0.0:
                return None, None
            weights[0] = w1
            cfg = cfg.replace(weights=tuple(weights))
        return cfg, params

    def objective(values):
        cfg, params = build(values)
        if cfg is None:
            return 1e30
        val = action_extended(cfg, params, quad)
        if not eliminate:
            val += problem.penalty_weight * (compute_constraint_T(cfg) - 1.0) ** 2
        return val

    if not names:
        cfg, params = build(np.array([]))
        if cfg is None:
            raise NonConvergenceError("constraint infeasible at the base point")
        el = el_residuals(cfg, params, quad)
        return SolutionRecord(cfg=cfg, params=params, residuals=el,
                              residual_norm=el.norm(), converged=True, iterations=0,
                              start_index=0, mode="minimize",
                              objective=action_extended(cfg, params, quad))

    rng = np.random.default_rng(problem.seed)
    base = np.array([problem.base_value(n) for n in names])
    lower = np.array([problem.bound_for(n)[0] for n in names])
    upper = np.array([problem.bound_for(n)[1] for n in names])
    starts = [base]
    for _ in range(max(0, problem.n_starts - 1)):
        starts.append(np.clip(base * (1.0 + 0.4 * rng.standard_normal(len(base))), lower, upper))

    best = None
    for si, x0 in enumerate(starts):
        x, fval, it = _nelder_mead(objective, x0, lower, upper, max_iter=max_iter)
        if fval >= 1e30:
            continue
        if best is None or fval < best[1]:
            best = (x, fval, it, si)
    if best is None:
        raise NonConvergenceError("no feasible start for the constrained minimization")
    x, fval, it, si = best
    cfg, params = build(x)
    el = el_residuals(cfg, params, quad)
    return SolutionRecord(cfg=cfg, params=params, residuals=el, residual_norm=el.norm(),
                          converged=True, iterations=it, start_index=si,
                          mode="minimize", objective=fval)


def verify_solution(record: SolutionRecord, tol: float = 1e-8,
                    quad: QuadSettings | None = None, curve_span: float = 2.5):
    """Re-check a record at tightened quadrature and reclassify stability.

    Returns (stability, residuals, flags); flags["degraded"] marks residuals
    growing by more than 10x under refinement, flags["passed"] the overall
    verdict against `tol`.
    """
    quad = (quad or QuadSettings()).tightened()
    ev = VariationEvaluator(record.cfg, record.params, quad)
    el = el_residuals(record.cfg, record.params, quad, evaluator=ev)
    top = record.cfg.max_mass
    curve = sample_vcurve(record.cfg, record.params,
                          (-curve_span * top, curve_span * top, 201), quad, evaluator=ev)
    stability = classify_stability(curve, record.cfg,
                                   tol=1e-6 * float(np.max(np.abs(curve.values))))
    norm = el.norm()
    degraded = norm > 10.0 * max(record.residual_norm, tol)
    flags = {"degraded": bool(degraded), "passed": bool(norm <= tol and not degraded)}
    return stability, el, flags
