"""
p-capacitary potentials and the analysis checks built on them.
"""

from .barrier import BarrierProfile, barrier_subsolution_check, construct_barrier
from .extension import extension_inequality_report
from .hopf import gradient_convexity_check, hopf_growth_fit
from .laplacians import q_laplacian, q_laplacian_sign_check
from .radial import radial_capacity, radial_derivative, radial_extension_terms, radial_potential, sphere_area
from .solver import PLapConfig, PLapSolver, Ring, comparison_check, p_energy, solve_p_capacitary

__all__ = [
    "BarrierProfile",
    "barrier_subsolution_check",
    "construct_barrier",
    "extension_inequality_report",
    "gradient_convexity_check",
    "hopf_growth_fit",
    "q_laplacian",
    "q_laplacian_sign_check",
    "radial_capacity",
    "radial_derivative",
    "radial_extension_terms",
    "radial_potential",
    "sphere_area",
    "PLapConfig",
    "PLapSolver",
    "Ring",
    "comparison_check",
    "p_energy",
    "solve_p_capacitary",
]
