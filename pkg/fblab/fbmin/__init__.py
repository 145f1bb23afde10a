"""
Outer minimization of the Dirichlet-plus-perimeter energy.
"""

from .bruteforce import BruteForceResult, ShapeFamily, parametric_bruteforce
from .descent import MinimizeConfig, MinimizerReport, minimize
from .energy import (
    EnergyTerms,
    fb_graph_curvature_check,
    fb_residual,
    hull_free_boundary_inequality,
    total_energy,
)
from .oracle import fb_identity_residual, radial_energy_sweep, radial_optimal_radius

__all__ = [
    "BruteForceResult",
    "ShapeFamily",
    "parametric_bruteforce",
    "MinimizeConfig",
    "MinimizerReport",
    "minimize",
    "EnergyTerms",
    "fb_graph_curvature_check",
    "fb_residual",
    "hull_free_boundary_inequality",
    "total_energy",
    "fb_identity_residual",
    "radial_energy_sweep",
    "radial_optimal_radius",
]
