"""Variational analysis of vacuum Dirac-sea configurations in momentum space.

The package evaluates the Lorentz-invariant (extended) action of a
superposition of Dirac seas, computes the variation density produced by a
test sea of infinitesimal weight, finds critical points and constrained
minimizers, and classifies state stability.  An independent oracle layer
cross-checks the closed-form convolution kernels and the radial Plancherel
identity against brute-force quadrature.
"""

from .model import (
    SeaConfig,
    CouplingParams,
    DerivedScalars,
    ValidationError,
    compute_m3,
    compute_m5,
    compute_constraint_T,
    derived_scalars,
    normalize_gauge,
    denormalize_gauge,
    load_config,
)
from .quadrature import QuadSettings, IntegrationError
from .kernels import (
    ConeRegion,
    delta_fn,
    J_fn,
    K_fn,
    H_fn,
    K1_kernel,
    K2_kernel,
    L1_kernel,
    L2_kernel,
    H_eps_kernel,
)
from .action import (
    PairIntegralTable,
    pair_integral,
    build_pair_table,
    action_quartic,
    action_extended,
    regularized_action,
)
from .variation import (
    VCurve,
    ELResiduals,
    StabilityReport,
    VariationEvaluator,
    variation_density,
    variation_density_prime,
    el_residuals,
    classify_stability,
    sample_vcurve,
    gauge_compensation,
)
from .solve import (
    SolveProblem,
    SolutionRecord,
    solve_critical,
    minimize_action,
    verify_solution,
)

__version__ = "0.1.0"

__all__ = [
    "SeaConfig",
    "CouplingParams",
    "DerivedScalars",
    "ValidationError",
    "compute_m3",
    "compute_m5",
    "compute_constraint_T",
    "derived_scalars",
    "normalize_gauge",
    "denormalize_gauge",
    "load_config",
    "QuadSettings",
    "IntegrationError",
    "ConeRegion",
    "delta_fn",
    "J_fn",
    "K_fn",
    "H_fn",
    "K1_kernel",
    "K2_kernel",
    "L1_kernel",
    "L2_kernel",
    "H_eps_kernel",
    "PairIntegralTable",
    "pair_integral",
    "build_pair_table",
    "action_quartic",
    "action_extended",
    "regularized_action",
    "VCurve",
    "ELResiduals",
    "StabilityReport",
    "VariationEvaluator",
    "variation_density",
    "variation_density_prime",
    "el_residuals",
    "classify_stability",
    "sample_vcurve",
    "gauge_compensation",
    "SolveProblem",
    "SolutionRecord",
    "solve_critical",
    "minimize_action",
    "verify_solution",
    "__version__",
]
