"""
Boundary behaviour of capacitary potentials: linear growth at a boundary point
and the gradient along flat sides.
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..errors import PreconditionError
from ..grid_core.grid import ScalarField
from ..reporting import Measured, Report
from ..verify.tolerances import get_tolerance
from .boundary import inward_gradient

logger = logging.getLogger(__name__)

ANGLES = 720
CIRCLES = 8
ANCHOR = "near a boundary point y the oscillation max_{|x-y|<r} u(x) - u(y) grows linearly, c r < . < C r"


def oscillation(u: ScalarField, point: np.ndarray, radius: float) -> float:
    """max over the closed disk of radius ``radius`` of u(x) - u(point), sampled on circles."""
    theta = np.linspace(0.0, 2.0 * np.pi, ANGLES, endpoint=False)
    directions = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    radii = radius * np.arange(1, CIRCLES + 1) / CIRCLES
    samples = point + radii[:, None, None] * directions[None, :, :]
    return float(np.max(u.sample(samples)) - u.sample(point[None, :])[0])


def hopf_growth_fit(
    u: ScalarField,
    boundary_point: Sequence[float],
    radii: Sequence[float],
    orientation: str = "auto",
    expected_slope: Optional[float] = None,
    tol: Optional[float] = None,
) -> Report:
    """Fit m(r) = s r + c r^2 to the oscillation at ``boundary_point``.

    ``orientation`` is ``"up"`` (growth of u), ``"down"`` (growth of -u) or
    ``"auto"``, which measures -u when u(y) is above one half (y on the inner
    body). With ``expected_slope`` the slope is judged by relative error,
    otherwise by positivity.

    Raises:
        PreconditionError: If a disk leaves the box or the orientation is unknown
    """
    point = np.asarray(boundary_point, dtype=float)
    radii = np.asarray(sorted(radii), dtype=float)
    if orientation not in ("auto", "up", "down"):
        raise PreconditionError(f"unknown orientation '{orientation}'")
    if np.any(radii <= 0):
        raise PreconditionError("radii must be positive")
    reach = float(u.grid.box_distance(point))
    if len(radii) and radii[-1] > reach:
        raise PreconditionError(f"radius {radii[-1]} exceeds the distance {reach:.4g} to the box")

    base = float(u.sample(point[None, :])[0])
    flip = orientation == "down" or (orientation == "auto" and base > 0.5)
    field = u.with_values(-u.values) if flip else u
    metadata = {"n": u.grid.n, "R": u.grid.radius, "point": point.tolist(), "oriented": "down" if flip else "up"}

    if len(radii) < 2:
        return Report.skipped("hopf_growth", ANCHOR, "insufficient data: at least two radii are needed", metadata)

    growth = np.array([oscillation(field, point, r) for r in radii])
    design = np.stack([radii, radii ** 2], axis=1)
    (slope, curvature), *_ = np.linalg.lstsq(design, growth, rcond=None)
    linear = np.dot(radii, growth) / np.dot(radii, radii)
    linearity = float(np.sqrt(np.mean((growth - linear * radii) ** 2)) / max(np.max(np.abs(growth)), 1e-300))
    values = {
        "slope": Measured(float(slope), "1/length"),
        "quadratic": Measured(float(curvature), "1/length^2"),
        "linearity_residual": Measured(linearity),
    }
    logger.info(f"Hopf fit at {point.tolist()}: slope {slope:.6g}")
    if expected_slope is None:
        return Report.judge("hopf_growth", ANCHOR, -float(slope), 0.0, values, metadata)
    tol = get_tolerance("hopf_slope") if tol is None else tol
    values["expected_slope"] = Measured(float(expected_slope), "1/length")
    error = abs(slope - expected_slope) / abs(expected_slope)
    return Report.judge("hopf_growth", ANCHOR, float(error), tol, values, metadata)


GRADIENT_ANCHOR = "along a straight segment of the boundary of a convex ring, 1/|Du| is a convex function of arclength"


def gradient_convexity_check(
    u: ScalarField,
    segment: Sequence[Sequence[float]],
    samples: int = 17,
    trim: float = 0.1,
    tol: Optional[float] = None,
) -> Report:
    """Midpoint convexity of 1/|Du| along a flat piece of the zero level of ``u``.

    ``segment`` gives the two endpoints; a fraction ``trim`` is dropped at
    each end so the samples stay off the corners.

    Raises:
        PreconditionError: If the segment is degenerate or u has no gradient on it
    """
    start, end = (np.asarray(point, dtype=float) for point in segment)
    length = float(np.linalg.norm(end - start))
    if length <= 0 or samples < 3:
        raise PreconditionError("gradient convexity needs a nondegenerate segment and at least three samples")
    tangent = (end - start) / length
    normal = np.array([tangent[1], -tangent[0]])
    h = u.grid.h
    middle = 0.5 * (start + end)
    if u.sample((middle + 2.0 * h * normal)[None, :])[0] > u.sample((middle - 2.0 * h * normal)[None, :])[0]:
        normal = -normal

    s = np.linspace(trim, 1.0 - trim, samples) * length
    points = start + s[:, None] * tangent
    norm = inward_gradient(u, points, np.broadcast_to(normal, points.shape))
    if np.any(norm <= 1e-12):
        raise PreconditionError("u has vanishing gradient on the segment")
    inverse = 1.0 / norm

    gaps = []
    for k in range(1, samples - 1):
        m = np.arange(1, min(k, samples - 1 - k) + 1)
        gaps.append(np.max(2.0 * inverse[k] - inverse[k - m] - inverse[k + m]))
    scale = float(np.max(inverse))
    violation = float(max(gaps)) / scale
    tol = get_tolerance("gradient_convexity") if tol is None else tol
    return Report.judge(
        "gradient_convexity",
        GRADIENT_ANCHOR,
        violation,
        tol,
        values={"worst_midpoint_excess": Measured(violation),
                "max_inverse_gradient": Measured(scale, "length")},
        metadata={"n": u.grid.n, "R": u.grid.radius, "segment": [start.tolist(), end.tolist()], "samples": samples},
    )
