"""Forward and inverse spectral computations on convex planar domains."""

from .boundary_data import BoundaryTrace, LaplacianTrace, SFunction
from .geometry import (
    BodyPair,
    ConvexBody,
    SupportFn,
    boundary_integral_normal_fn,
    canonical_angle,
    convexity_check,
    disk,
    eval_support,
    minkowski_sum,
    mixed_support_integral,
    pair_add,
    pair_equal,
    pair_scalar_product,
    pair_scale,
    scale,
)
from .interval import (
    Eigen1D,
    IntervalProblem,
    interval_identity_residual,
    recover_endpoint,
    s_values_1d,
    s_values_richardson,
    solve_interval,
)
from .membrane import (
    DiscreteOperator,
    EigenPair2D,
    PotentialSpec,
    boundary_gradient_trace,
    discretize,
    eigenvalue_from_boundary,
    forward_s_functions,
    membrane_identity_residual,
    rayleigh_quotient,
    s_function,
    shape_derivative,
    solve_eigen,
)

__version__ = "0.1.0"
