"""
Discrete curvature of region contours.
"""

import logging
from typing import List, Optional

import numpy as np

from ..errors import PreconditionError
from ..grid_core.region import Region

logger = logging.getLogger(__name__)

MIN_VERTICES = 8
WINDOW = 5


def resample_loop(loop: np.ndarray, spacing: float) -> np.ndarray:
    """Closed loop resampled at uniform arclength (at least MIN_VERTICES points)."""
    closed = np.vstack([loop, loop[:1]])
    arclength = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    total = arclength[-1]
    count = max(MIN_VERTICES, int(round(total / spacing)))
    s = np.linspace(0.0, total, count, endpoint=False)
    return np.stack([np.interp(s, arclength, closed[:, 0]), np.interp(s, arclength, closed[:, 1])], axis=1)


def circle_fit_curvature(loop: np.ndarray) -> np.ndarray:
    """Signed curvature at each vertex from a circle fit over a centered window.

    In the frame of the local tangent (x) and left normal (y) the window is
    fitted by a (x^2 + y^2) + b x + y + c = 0; the curvature is
    -2a / sqrt(b^2 + 1 - 4ac), positive when the fitted center lies to the
    left, i.e. for convex parts of a region kept on the left.
    """
    m = len(loop)
    half = WINDOW // 2
    offsets = np.arange(-half, half + 1)
    window = loop[(np.arange(m)[:, None] + offsets[None, :]) % m] - loop[:, None, :]
    tangent = loop[(np.arange(m) + 1) % m] - loop[(np.arange(m) - 1) % m]
    tangent /= np.maximum(np.linalg.norm(tangent, axis=1, keepdims=True), 1e-300)
    normal = np.stack([-tangent[:, 1], tangent[:, 0]], axis=1)
    x = np.einsum("mwk,mk->mw", window, tangent)
    y = np.einsum("mwk,mk->mw", window, normal)

    design = np.stack([x * x + y * y, x, np.ones_like(x)], axis=2)
    kappa = np.empty(m)
    for k in range(m):
        (a, b, c), *_ = np.linalg.lstsq(design[k], -y[k], rcond=None)
        kappa[k] = -2.0 * a / np.sqrt(max(b * b + 1.0 - 4.0 * a * c, 1e-300))
    return kappa


def loop_curvature(loop: np.ndarray, spacing: float) -> np.ndarray:
    """Curvature at the vertices of ``loop``, fitted on a uniform resampling."""
    if len(loop) < MIN_VERTICES:
        raise PreconditionError(f"curvature needs a contour with at least {MIN_VERTICES} vertices, got {len(loop)}")
    resampled = resample_loop(loop, spacing)
    kappa = circle_fit_curvature(resampled)

    closed = np.vstack([loop, loop[:1]])
    arclength = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(closed, axis=0), axis=1))])
    total = arclength[-1]
    s_resampled = np.linspace(0.0, total, len(resampled), endpoint=False)
    return np.interp(arclength[:-1], s_resampled, kappa, period=total)


def contour_curvature(region: Region, spacing: Optional[float] = None) -> List[np.ndarray]:
    """Per-vertex curvature for each contour of ``region`` (interior convention).

    Raises:
        PreconditionError: If a contour has fewer than eight vertices
    """
    spacing = 2.0 * region.grid.h if spacing is None else spacing
    if not region.contours:
        raise PreconditionError("region has no contour")
    return [loop_curvature(loop, spacing) for loop in region.contours]
