"""
Refinement and dilation checks for the grid measures and the p-capacitary solver.

Rates are least-squares slopes of log error against log h over a dyadic
sequence of grids.
"""

import logging
import math
from typing import Dict, Optional, Sequence

import numpy as np

from ..errors import PreconditionError
from ..geomlab.curvature import contour_curvature
from ..grid_core.grid import Grid, ScalarField
from ..grid_core.region import measure, rasterize
from ..grid_core.shapes import Disk, Square
from ..plap.radial import radial_potential
from ..plap.solver import PLapConfig, p_energy, solve_p_capacitary
from ..reporting import Measured, Report
from .tolerances import get_tolerance

logger = logging.getLogger(__name__)

PERIMETER_SIZES = (32, 64, 128, 256)
SOLVER_SIZES = (64, 128, 256)
ANCHOR = "discrete measures and potentials converge under refinement and are covariant under dilation"


def convergence_rate(h: Sequence[float], errors: Sequence[float]) -> float:
    """Slope of log(error) against log(h).

    Raises:
        PreconditionError: If fewer than two levels are given or an error is not positive
    """
    h = np.asarray(h, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(h) < 2 or len(h) != len(errors):
        raise PreconditionError("a rate needs at least two refinement levels")
    if np.any(errors <= 0) or np.any(h <= 0):
        raise PreconditionError("refinement errors and spacings must be positive")
    slope, _ = np.polyfit(np.log(h), np.log(errors), 1)
    return float(slope)


def perimeter_convergence(
    r: float = 1.0,
    radius: float = 2.0,
    sizes: Sequence[int] = PERIMETER_SIZES,
    tolerances: Optional[Dict[str, float]] = None,
) -> Report:
    """Perimeter of the rasterized disk against 2 pi r, and its contour curvature against 1/r."""
    exact = 2.0 * math.pi * r
    spacings, errors, curvature_errors = [], [], []
    for n in sizes:
        grid = Grid(n, radius)
        region = rasterize(Disk(r), grid)
        _, perimeter = measure(region)
        spacings.append(grid.h)
        errors.append(abs(perimeter - exact))
        curvature_errors.append(max(abs(float(np.mean(kappa)) * r - 1.0) for kappa in contour_curvature(region)))
        logger.debug(f"Perimeter at n={n}: {perimeter:.8g} (error {errors[-1]:.3e})")
    rate = convergence_rate(spacings, errors)
    metadata = {"r": r, "R": radius, "sizes": list(sizes)}
    tol_rate = get_tolerance("perimeter_order", overrides=tolerances)
    tol_curvature = get_tolerance("curvature", overrides=tolerances)
    details = [
        Report.judge(
            "perimeter_order", "the interface polyline length converges to the perimeter at first order or better",
            tol_rate - rate, 0.0,
            {"rate": Measured(rate), "finest_error": Measured(errors[-1], "length")}, metadata,
        ),
        Report.judge(
            "circle_curvature", "the contour curvature of a disk is the inverse radius",
            max(curvature_errors), tol_curvature,
            {"worst_relative_error": Measured(max(curvature_errors))}, metadata,
        ),
    ]
    return Report.combine("perimeter_convergence", ANCHOR, details, metadata)


def plap_grid_order(
    a: float = 1.0,
    rho: float = 2.0,
    radius: float = 2.5,
    sizes: Sequence[int] = SOLVER_SIZES,
    cfg: Optional[PLapConfig] = None,
    tolerances: Optional[Dict[str, float]] = None,
) -> Report:
    """Max-norm error of the annulus potential against its closed form under refinement.

    Only nodes more than one cell from either interface enter the error, so
    the positions moved by interface snapping never do.
    """
    cfg = cfg or PLapConfig(p=2.0, tol_rel_energy=1e-12)
    p = cfg.p
    spacings, errors = [], []
    for n in sizes:
        grid = Grid(n, radius)
        K, Omega = rasterize(Disk(a), grid), rasterize(Disk(rho), grid)
        u = solve_p_capacitary(K, Omega, cfg)
        x, y = grid.node_coords()
        inside = (K.phi > grid.h) & (Omega.phi < -grid.h)
        exact = radial_potential(a, rho, p, 2, np.hypot(x[inside], y[inside]))
        spacings.append(grid.h)
        errors.append(float(np.max(np.abs(u.values[inside] - exact))))
        logger.debug(f"Annulus potential at n={n}: max error {errors[-1]:.3e}")
    rate = convergence_rate(spacings, errors)
    tol = get_tolerance("grid_order", overrides=tolerances)
    return Report.judge(
        "plap_grid_order", "the discrete potential of an annulus converges to the closed form",
        tol - rate, 0.0,
        {"order": Measured(rate), "finest_error": Measured(errors[-1])},
        {"p": p, "a": a, "rho": rho, "R": radius, "sizes": list(sizes), "errors": errors},
    )


def plap_scaling(
    s: float = 2.0,
    n: int = 64,
    cfg: Optional[PLapConfig] = None,
    tolerances: Optional[Dict[str, float]] = None,
) -> Report:
    """Potential of a square inside a disk against the one on the geometry dilated by ``s``.

    On the dilated grid node (i, j) sits at s times its old position, so
    u_s(x) = u(x / s) compares node values directly; the energy scales by
    s^(2 - p) in the plane.
    """
    if not s > 0:
        raise PreconditionError(f"dilation factor must be positive, got {s}")
    cfg = cfg or PLapConfig(p=2.0)
    p = cfg.p

    def solve(scale: float) -> ScalarField:
        grid = Grid(n, 2.5 * scale)
        return solve_p_capacitary(rasterize(Square(1.0 * scale), grid), rasterize(Disk(2.0 * scale), grid), cfg)

    u, u_s = solve(1.0), solve(s)
    potential_error = float(np.max(np.abs(u_s.values - u.values)))
    energy, energy_s = p_energy(u, p), p_energy(u_s, p)
    expected = energy * s ** (2.0 - p)
    energy_error = abs(energy_s - expected) / abs(expected)
    tol = get_tolerance("scaling", overrides=tolerances)
    return Report.judge(
        "plap_scaling", "dilating the ring dilates the potential and scales the energy by s^(n-p)",
        max(potential_error, energy_error), tol,
        {"potential_error": Measured(potential_error), "energy_error": Measured(energy_error),
         "energy": Measured(energy, "energy"), "dilated_energy": Measured(energy_s, "energy")},
        {"p": p, "s": s, "n": n},
    )


def verify_convergence(
    p_list: Sequence[float] = (2.0,),
    scales: Sequence[float] = (0.5, 2.0),
    tolerances: Optional[Dict[str, float]] = None,
) -> Report:
    """Perimeter and curvature under refinement, solver order at p = 2 and dilation covariance per p."""
    details = [perimeter_convergence(tolerances=tolerances),
               plap_grid_order(tolerances=tolerances)]
    for p in map(float, p_list):
        for s in map(float, scales):
            details.append(plap_scaling(s, cfg=PLapConfig(p=p), tolerances=tolerances))
    return Report.combine("convergence", ANCHOR, details, {"p": [float(p) for p in p_list],
                                                          "scales": [float(s) for s in scales]})
