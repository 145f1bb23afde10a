"""
Quantities on region contours: normals, arclength weights, one-sided gradients.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from ..grid_core.grid import ScalarField
from ..grid_core.region import Region


@dataclass(frozen=True, eq=False)
class BoundarySamples:
    points: np.ndarray   # (m, 2)
    normals: np.ndarray  # (m, 2) outward unit normals
    weights: np.ndarray  # (m,) trapezoid arclength weights
    loop: np.ndarray     # (m,) loop index of each vertex


def loop_normals(loop: np.ndarray) -> np.ndarray:
    """Outward unit normals of a loop that keeps its region on the left."""
    tangent = np.roll(loop, -1, axis=0) - np.roll(loop, 1, axis=0)
    tangent /= np.maximum(np.linalg.norm(tangent, axis=1, keepdims=True), 1e-300)
    return np.stack([tangent[:, 1], -tangent[:, 0]], axis=1)


def loop_weights(loop: np.ndarray) -> np.ndarray:
    forward = np.linalg.norm(np.roll(loop, -1, axis=0) - loop, axis=1)
    return 0.5 * (forward + np.roll(forward, 1))


def boundary_samples(region: Region) -> BoundarySamples:
    loops: List[np.ndarray] = region.contours
    if not loops:
        empty = np.zeros((0, 2))
        return BoundarySamples(empty, empty, np.zeros(0), np.zeros(0, dtype=int))
    return BoundarySamples(
        np.vstack(loops),
        np.vstack([loop_normals(loop) for loop in loops]),
        np.concatenate([loop_weights(loop) for loop in loops]),
        np.concatenate([np.full(len(loop), k) for k, loop in enumerate(loops)]),
    )


def inward_gradient(u: ScalarField, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """|grad u| at boundary points where u vanishes, from samples 2h and 3h inside.

    Fits u(s) = g s + c s^2 along the inward normal through u(0) = 0.
    """
    h = u.grid.h
    near = u.sample(points - 2.0 * h * normals)
    far = u.sample(points - 3.0 * h * normals)
    return np.abs(2.25 * near - far) / (1.5 * h)


def normal_derivative(u: ScalarField, points: np.ndarray, normals: np.ndarray) -> np.ndarray:
    """Centered outward normal derivative for a field smooth across the points."""
    delta = 1.5 * u.grid.h
    return (u.sample(points + delta * normals) - u.sample(points - delta * normals)) / (2.0 * delta)
