"""
Signed distance level sets: redistancing from the contour, smoothing and
extension of boundary velocities, and normal motion of the zero level.
"""

import logging

import numpy as np
import shapely
from scipy import sparse
from scipy.sparse.linalg import spsolve
from scipy.spatial import cKDTree
from shapely.geometry import LinearRing, MultiLineString

from ..grid_core.grid import Grid
from ..grid_core.region import Region

logger = logging.getLogger(__name__)


def reinitialize(region: Region) -> Region:
    """Same region with ``phi`` replaced by the exact distance to its contours.

    The sign of ``phi`` is kept node by node, so the zero level only moves by
    the chord error of the contour.
    """
    if not region.contours:
        logger.warning("Level set has no zero crossing; keeping the input")
        return region
    grid = region.grid
    curves = MultiLineString([LinearRing(loop) for loop in region.contours])
    x, y = grid.node_coords()
    dist = shapely.distance(curves, shapely.points(x.ravel(), y.ravel())).reshape(grid.shape)
    return Region.from_phi(grid, np.where(region.phi < 0, -dist, dist))


def loop_neighbours(loop: np.ndarray):
    """Previous and next vertex of every vertex, wrapping within its loop."""
    index = np.arange(len(loop))
    previous, following = index - 1, index + 1
    for k in np.unique(loop):
        members = np.flatnonzero(loop == k)
        previous[members[0]] = members[-1]
        following[members[-1]] = members[0]
    return previous, following


def _project(nodes: np.ndarray, a: np.ndarray, b: np.ndarray):
    ab = b - a
    t = np.einsum("ij,ij->i", nodes - a, ab) / np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    t = np.clip(t, 0.0, 1.0)
    return t, np.linalg.norm(nodes - (a + t[:, None] * ab), axis=1)


def extend_to_nodes(grid: Grid, points: np.ndarray, values: np.ndarray, loop: np.ndarray) -> np.ndarray:
    """Extend contour data to every node, constant along normals.

    Each node takes the linear interpolant of ``values`` at its foot point on
    the nearer of the two contour segments next to its nearest vertex.
    """
    x, y = grid.node_coords()
    nodes = np.stack([x.ravel(), y.ravel()], axis=1)
    _, nearest = cKDTree(points).query(nodes)
    previous, following = loop_neighbours(loop)

    t_back, d_back = _project(nodes, points[previous[nearest]], points[nearest])
    t_ahead, d_ahead = _project(nodes, points[nearest], points[following[nearest]])
    back = (1.0 - t_back) * values[previous[nearest]] + t_back * values[nearest]
    ahead = (1.0 - t_ahead) * values[nearest] + t_ahead * values[following[nearest]]
    return np.where(d_back < d_ahead, back, ahead).reshape(grid.shape)


def h1_smooth_along_loops(values: np.ndarray, points: np.ndarray, loop: np.ndarray, length: float) -> np.ndarray:
    """H^1 Riesz representative of ``values`` on each closed loop.

    Solves ``v - length^2 v'' = values`` in arclength with linear elements,
    i.e. (M + length^2 S) v = M values with the lumped mass M and the
    periodic stiffness S of the polyline. Constants are reproduced exactly
    and a mode of wavelength w is damped by 1 / (1 + (2 pi length / w)^2).
    """
    out = np.array(values, dtype=float)
    for k in np.unique(loop):
        members = np.flatnonzero(loop == k)
        m = members.size
        if m < 3:
            continue
        xy = points[members]
        edge = np.linalg.norm(np.roll(xy, -1, axis=0) - xy, axis=1)
        edge = np.maximum(edge, 1e-3 * edge.mean())
        mass = 0.5 * (edge + np.roll(edge, 1))
        stiffness = length ** 2 / edge
        i = np.arange(m)
        j = (i + 1) % m
        matrix = sparse.coo_matrix(
            (
                np.concatenate([-stiffness, -stiffness, mass + stiffness + np.roll(stiffness, 1)]),
                (np.concatenate([i, j, i]), np.concatenate([j, i, i])),
            ),
            shape=(m, m),
        ).tocsc()
        out[members] = spsolve(matrix, mass * out[members])
    return out


def move_interface(phi: np.ndarray, displacement: np.ndarray) -> np.ndarray:
    """Move the zero level of a distance function outward by ``displacement`` per node."""
    return phi - displacement
