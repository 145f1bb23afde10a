"""
Convex hulls, contour and viscosity curvature, quadratic-form machinery and
analytic capsules.
"""

from .capsule import (
    Capsule,
    capsule_ruling_profile,
    capsule_tangency_graph,
    hull_inverse_curvature_concavity_check,
    upper_semicontinuity_check,
)
from .curvature import contour_curvature
from .hull import convex_hull, convexity_deficit
from .matrices import (
    LocalGraph,
    SymMatrix,
    block_reduction_check,
    graph_mean_curvature,
    inf_convolution,
    inf_convolution_matrix,
    trace_inequality_check,
    viscosity_mean_curvature,
)

__all__ = [
    "Capsule",
    "capsule_ruling_profile",
    "capsule_tangency_graph",
    "hull_inverse_curvature_concavity_check",
    "upper_semicontinuity_check",
    "contour_curvature",
    "convex_hull",
    "convexity_deficit",
    "LocalGraph",
    "SymMatrix",
    "block_reduction_check",
    "graph_mean_curvature",
    "inf_convolution",
    "inf_convolution_matrix",
    "trace_inequality_check",
    "viscosity_mean_curvature",
]
