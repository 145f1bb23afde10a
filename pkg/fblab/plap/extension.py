"""
The extension-energy inequality for nested rings.

For K inside Omega1 inside Omega2, let u1 and u2 be the p-capacitary
potentials of Omega1 \\ K and Omega2 \\ K. With

    A = E(u1) - E(u2)
    B = (p - 1) * energy of u2 on Omega2 \\ Omega1
    C = p * integral over the free part of the boundary of Omega1 of
        u2 (|Du1|^(p-1) + |Du2|^(p-2) d_nu u2)

the chain 0 <= A - B <= C holds. The first inequality needs no smoothness of
Omega1; the boundary term C uses one-sided differences along the contour.
"""

import logging
from typing import Optional

import numpy as np

from ..errors import PreconditionError
from ..grid_core.grid import ScalarField
from ..grid_core.region import Region, region_contains
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance
from .boundary import boundary_samples, inward_gradient, normal_derivative
from .mesh import triangle_energies
from .solver import PLapConfig, check_nested, p_energy, solve_p_capacitary

logger = logging.getLogger(__name__)

ANCHOR = (
    "the p-harmonic extension u2 of u1 from Omega1 to Omega2 satisfies "
    "0 <= E(u1) - E(u2) - (p-1) int_{Omega2 minus Omega1} |Du2|^p <= boundary flux term"
)


def outer_energy(u2: ScalarField, p: float, omega1: Region) -> float:
    """Energy of ``u2`` on triangles whose centroid lies outside ``omega1``."""
    energies, mesh = triangle_energies(u2, p)
    outside = ScalarField(omega1.grid, omega1.phi).sample(mesh.centroids()) >= 0
    return float(energies[outside].sum())


def boundary_flux_term(u1: ScalarField, u2: ScalarField, p: float, omega1: Region, omega2: Region) -> float:
    """C, integrated over contour vertices of Omega1 at least 1.5h inside Omega2."""
    samples = boundary_samples(omega1)
    if len(samples.points) == 0:
        return 0.0
    h = omega1.grid.h
    free = ScalarField(omega2.grid, omega2.phi).sample(samples.points) < -1.5 * h
    if not free.any():
        return 0.0
    points, normals, weights = samples.points[free], samples.normals[free], samples.weights[free]
    grad_1 = inward_gradient(u1, points, normals)
    d_nu_2 = normal_derivative(u2, points, normals)
    values_2 = u2.sample(points)
    integrand = values_2 * (grad_1 ** (p - 1.0) + np.abs(d_nu_2) ** (p - 2.0) * d_nu_2)
    return float(p * np.dot(weights, integrand))


def extension_terms(K: Region, omega1: Region, omega2: Region, p: float, cfg: Optional[PLapConfig] = None) -> dict:
    if not region_contains(omega2, omega1, 0.0):
        raise PreconditionError("Omega1 is not contained in Omega2")
    check_nested(K, omega1)
    cfg = cfg or PLapConfig(p=p)
    u1 = solve_p_capacitary(K, omega1, cfg)
    u2 = solve_p_capacitary(K, omega2, cfg)
    e1, e2 = p_energy(u1, p), p_energy(u2, p)
    return {
        "A": e1 - e2,
        "B": (p - 1.0) * outer_energy(u2, p, omega1),
        "C": boundary_flux_term(u1, u2, p, omega1, omega2),
        "E1": e1,
        "E2": e2,
    }


def extension_inequality_report(
    K: Region,
    omega1: Region,
    omega2: Region,
    p: float,
    cfg: Optional[PLapConfig] = None,
    smooth: bool = True,
    tol: Optional[float] = None,
) -> Report:
    """Check 0 <= A - B <= C + tol; only 0 <= A - B when ``smooth`` is False.

    ``tol`` is the absolute slack; by default it is the table value times h
    times the energy scale E(u1).
    """
    if cfg is not None and cfg.p != p:
        raise PreconditionError(f"solver exponent {cfg.p} differs from p={p}")
    terms = extension_terms(K, omega1, omega2, p, cfg)
    h = K.grid.h
    if tol is None:
        tol = get_tolerance("extension", h) * max(terms["E1"], 1.0)
    gap = terms["A"] - terms["B"]
    lower = -gap
    upper = gap - terms["C"] if smooth else -np.inf
    violation = max(lower, upper)
    logger.info(
        f"Extension terms p={p}: A={terms['A']:.6g} B={terms['B']:.6g} C={terms['C']:.6g} (tol {tol:.3g})"
    )
    return Report.judge(
        "extension_inequality",
        ANCHOR,
        violation,
        tol,
        values={name: Measured(value, "energy") for name, value in terms.items()},
        metadata={"p": p, "n": K.grid.n, "R": K.grid.radius, "upper_bound_checked": smooth},
    )
