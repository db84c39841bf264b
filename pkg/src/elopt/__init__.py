"""Entropy-like functions on the non-negative orthant.

Expression trees with exact one-sided partial derivatives, separating
surfaces, feasibility and property verification, normal-ratio cost bounds,
optimal constructions for linear/convex/concave surfaces, and an independent
grid-LP lower bound.  See the README for the CLI.
"""

from .analysis import (
    BoundReport,
    ELReport,
    FeasibilityReport,
    PropertyCheck,
    RatioBound,
    check_el,
    check_feasible,
    gap_report,
    normal_ratio_bound,
    sup_ratio_sampled,
)
from .constructions import (
    ConstructionResult,
    concave_construct,
    convex_diag,
    convex_plateau,
    linear_opt,
    linear_opt_curve,
)
from .errors import (
    ConfigError,
    ConstructionError,
    DomainError,
    EloptError,
    ShapeError,
    SolverError,
    UnboundedRangeError,
)
from .exprs import (
    Clamp,
    ConcaveStep,
    ConvexDiag,
    ConvexPlateau,
    ELExpr,
    Linear,
    OneSidedGrad,
    Scale,
    Sum,
    TruncateMin,
    cost,
    cost_total,
    eval_at,
    finite_difference_partials,
    one_sided_partials,
)
from .lp_oracle import (
    GridLP,
    LPSolution,
    RestrictionReport,
    build_lp,
    dump_lp,
    grid_points,
    restriction_check,
    solve_lp,
)
from .surfaces import (
    SHAPE_CONCAVE,
    SHAPE_CONVEX,
    SHAPE_LINEAR,
    Curve2D,
    Hyperplane,
    HyperbolaCurve,
    LineCurve,
    QuadraticCurve,
    SurfaceValidationReport,
    TPoint,
    bisect_decreasing,
    hyperbola_through,
    normal,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ELReport",
    "FeasibilityReport",
    "PropertyCheck",
    "RatioBound",
    "check_el",
    "check_feasible",
    "gap_report",
    "normal_ratio_bound",
    "sup_ratio_sampled",
    "ConstructionResult",
    "concave_construct",
    "convex_diag",
    "convex_plateau",
    "linear_opt",
    "linear_opt_curve",
    "ConfigError",
    "ConstructionError",
    "DomainError",
    "EloptError",
    "ShapeError",
    "SolverError",
    "UnboundedRangeError",
    "Clamp",
    "ConcaveStep",
    "ConvexDiag",
    "ConvexPlateau",
    "ELExpr",
    "Linear",
    "OneSidedGrad",
    "Scale",
    "Sum",
    "TruncateMin",
    "cost",
    "cost_total",
    "eval_at",
    "finite_difference_partials",
    "one_sided_partials",
    "GridLP",
    "LPSolution",
    "RestrictionReport",
    "build_lp",
    "dump_lp",
    "grid_points",
    "restriction_check",
    "solve_lp",
    "SHAPE_CONCAVE",
    "SHAPE_CONVEX",
    "SHAPE_LINEAR",
    "Curve2D",
    "Hyperplane",
    "HyperbolaCurve",
    "LineCurve",
    "QuadraticCurve",
    "SurfaceValidationReport",
    "TPoint",
    "bisect_decreasing",
    "hyperbola_through",
    "normal",
    "validate",
]
