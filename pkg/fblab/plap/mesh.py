"""
P1 triangulation of the grid and the regularized p-energy on it.

Every cell ``(i, j)`` with corners a=(i,j), b=(i+1,j), c=(i,j+1), d=(i+1,j+1)
is split into the triangles (a, b, c) and (d, c, b). Node positions may be
moved off the grid (interface snapping); per-triangle gradient operators are
built from the actual vertex coordinates.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse

from ..grid_core.grid import Grid, ScalarField
from ..grid_core.region import Region

logger = logging.getLogger(__name__)

# Free nodes closer than this many cells to an interface are pinned onto it.
SNAP_FRACTION = 0.25
# Triangles whose area falls below this share of h^2 / 2 revert their snaps.
MIN_AREA_FRACTION = 0.05
# Edges of the triangulation, as node offsets.
NEIGHBOUR_OFFSETS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


@dataclass(frozen=True, eq=False)
class P1Mesh:
    grid: Grid
    nodes: np.ndarray      # (N, 2)
    triangles: np.ndarray  # (T, 3) flat node indices
    grads: np.ndarray      # (T, 2, 3) gradient of each hat function
    areas: np.ndarray      # (T,)
    cells: np.ndarray      # (T,) flat cell index

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    def centroids(self) -> np.ndarray:
        return self.nodes[self.triangles].mean(axis=1)

    def subset(self, keep: np.ndarray) -> "P1Mesh":
        return P1Mesh(self.grid, self.nodes, self.triangles[keep], self.grads[keep], self.areas[keep], self.cells[keep])


def grid_triangles(grid: Grid) -> Tuple[np.ndarray, np.ndarray]:
    n = grid.n
    index = np.arange((n + 1) * (n + 1)).reshape(n + 1, n + 1)
    a = index[:-1, :-1].ravel()
    b = index[1:, :-1].ravel()
    c = index[:-1, 1:].ravel()
    d = index[1:, 1:].ravel()
    triangles = np.concatenate([np.stack([a, b, c], axis=1), np.stack([d, c, b], axis=1)])
    cells = np.tile(np.arange(n * n), 2)
    return triangles, cells


def signed_areas(nodes: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0, p1, p2 = (nodes[triangles[:, k]] for k in range(3))
    e1, e2 = p1 - p0, p2 - p0
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def build_mesh(grid: Grid, nodes: Optional[np.ndarray] = None) -> P1Mesh:
    """Triangulate ``grid``; ``nodes`` overrides the node positions, shape (n+1, n+1, 2)."""
    if nodes is None:
        x, y = grid.node_coords()
        nodes = np.stack([x, y], axis=-1)
    flat = np.asarray(nodes, dtype=float).reshape(-1, 2)
    triangles, cells = grid_triangles(grid)

    p0 = flat[triangles[:, 0]]
    edges = np.stack([flat[triangles[:, 1]] - p0, flat[triangles[:, 2]] - p0], axis=2)  # columns are edges
    det = edges[:, 0, 0] * edges[:, 1, 1] - edges[:, 0, 1] * edges[:, 1, 0]
    # grad u = E^{-T} [u1 - u0, u2 - u0]
    inv_t = np.empty_like(edges)
    inv_t[:, 0, 0] = edges[:, 1, 1] / det
    inv_t[:, 0, 1] = -edges[:, 1, 0] / det
    inv_t[:, 1, 0] = -edges[:, 0, 1] / det
    inv_t[:, 1, 1] = edges[:, 0, 0] / det
    diff = np.array([[-1.0, 1.0, 0.0], [-1.0, 0.0, 1.0]])
    grads = inv_t @ diff
    return P1Mesh(grid, flat, triangles, grads, 0.5 * det, cells)


def element_gradients(mesh: P1Mesh, u: np.ndarray) -> np.ndarray:
    return np.einsum("tkm,tm->tk", mesh.grads, u[mesh.triangles])


def energy(mesh: P1Mesh, u: np.ndarray, p: float, eps: float) -> float:
    """Sum over triangles of area * (|grad u|^2 + eps^2)^(p/2)."""
    g = element_gradients(mesh, u)
    s = np.einsum("tk,tk->t", g, g) + eps * eps
    return float(np.dot(mesh.areas, s ** (0.5 * p)))


def energy_gradient(mesh: P1Mesh, u: np.ndarray, p: float, eps: float) -> np.ndarray:
    g = element_gradients(mesh, u)
    s = np.einsum("tk,tk->t", g, g) + eps * eps
    coef = mesh.areas * p * s ** (0.5 * p - 1.0)
    local = coef[:, None] * np.einsum("tkm,tk->tm", mesh.grads, g)
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_nodes)


def _local_hessians(mesh: P1Mesh, u: np.ndarray, p: float, eps: float) -> np.ndarray:
    g = element_gradients(mesh, u)
    s = np.einsum("tk,tk->t", g, g) + eps * eps
    coef = mesh.areas * p * s ** (0.5 * p - 1.0)
    gg = np.einsum("tkm,tk->tm", mesh.grads, g)
    stiffness = np.einsum("tkm,tkl->tml", mesh.grads, mesh.grads)
    return coef[:, None, None] * (stiffness + ((p - 2.0) / s)[:, None, None] * gg[:, :, None] * gg[:, None, :])


def energy_hessian(mesh: P1Mesh, u: np.ndarray, p: float, eps: float, free: np.ndarray) -> sparse.csr_matrix:
    """Hessian restricted to the free nodes (``free`` is a flat boolean mask)."""
    local = _local_hessians(mesh, u, p, eps)
    position = np.full(mesh.n_nodes, -1)
    position[free] = np.arange(int(free.sum()))
    rows = np.broadcast_to(position[mesh.triangles][:, :, None], local.shape).ravel()
    cols = np.broadcast_to(position[mesh.triangles][:, None, :], local.shape).ravel()
    keep = (rows >= 0) & (cols >= 0)
    size = int(free.sum())
    return sparse.coo_matrix((local.ravel()[keep], (rows[keep], cols[keep])), shape=(size, size)).tocsr()


def energy_hessian_diagonal(mesh: P1Mesh, u: np.ndarray, p: float, eps: float) -> np.ndarray:
    local = _local_hessians(mesh, u, p, eps)
    diag = np.einsum("tmm->tm", local)
    return np.bincount(mesh.triangles.ravel(), weights=diag.ravel(), minlength=mesh.n_nodes)


def triangle_energies(field: ScalarField, p: float) -> Tuple[np.ndarray, P1Mesh]:
    """Exact |grad u|^p * area per triangle of the field's own mesh."""
    mesh = build_mesh(field.grid, field.nodes)
    g = element_gradients(mesh, field.values.ravel())
    norms = np.sqrt(np.einsum("tk,tk->t", g, g))
    return mesh.areas * norms ** p, mesh


def _has_neighbour(flags: np.ndarray) -> np.ndarray:
    padded = np.pad(flags, 1)
    rows, cols = flags.shape
    out = np.zeros_like(flags)
    for di, dj in NEIGHBOUR_OFFSETS:
        out |= padded[1 + di:1 + di + rows, 1 + dj:1 + dj + cols]
    return out


def _projection(phi: np.ndarray, h: float) -> np.ndarray:
    """Newton step from each node onto the zero level of ``phi``."""
    gx, gy = np.gradient(phi, h, h)
    norm2 = gx * gx + gy * gy
    scale = np.where(norm2 > 1e-12, -phi / np.maximum(norm2, 1e-12), 0.0)
    return np.stack([scale * gx, scale * gy], axis=-1)


@dataclass(frozen=True, eq=False)
class DirichletData:
    values: np.ndarray  # (n+1, n+1)
    fixed: np.ndarray   # (n+1, n+1) bool
    nodes: np.ndarray   # (n+1, n+1, 2)
    snapped: int


def dirichlet_data(K: Region, Omega: Region, snap: bool = True) -> DirichletData:
    """Boundary values of the capacitary problem on the ring Omega minus K.

    Nodes inside K carry 1; nodes outside Omega and on the box edge carry 0.
    With ``snap`` set, fixed nodes next to a free node move onto the zero level
    of the corresponding interface, and free nodes within SNAP_FRACTION * h of
    an interface are pinned onto it.
    """
    grid = Omega.grid
    h = grid.h
    x, y = grid.node_coords()
    positions = np.stack([x, y], axis=-1)

    edge = np.zeros(grid.shape, dtype=bool)
    edge[0, :] = edge[-1, :] = edge[:, 0] = edge[:, -1] = True
    in_k = K.phi < 0
    out = (Omega.phi >= 0) | edge
    if snap:
        between = ~in_k & ~out
        in_k = in_k | (between & (K.phi < SNAP_FRACTION * h))
        out = out | (between & ~in_k & (Omega.phi > -SNAP_FRACTION * h))
    one = in_k & ~edge
    zero = ~one & out
    fixed = one | zero
    values = one.astype(float)

    if not snap:
        return DirichletData(values, fixed, positions, 0)

    touching = _has_neighbour(~fixed)
    move = np.zeros_like(positions)
    to_k = one & touching
    to_omega = zero & ~edge & touching
    move[to_k] = _projection(K.phi, h)[to_k]
    move[to_omega] = _projection(Omega.phi, h)[to_omega]
    too_far = np.linalg.norm(move, axis=-1) > 1.5 * h
    move[too_far] = 0.0

    triangles, _ = grid_triangles(grid)
    for _ in range(8):
        nodes = positions + move
        bad = signed_areas(nodes.reshape(-1, 2), triangles) <= MIN_AREA_FRACTION * 0.5 * h * h
        if not bad.any():
            break
        flat_move = move.reshape(-1, 2)
        flat_move[np.unique(triangles[bad].ravel())] = 0.0
        move = flat_move.reshape(move.shape)
    nodes = positions + move
    snapped = int(np.count_nonzero(np.linalg.norm(move, axis=-1)))
    logger.debug(f"Snapped {snapped} boundary nodes onto the interfaces")
    return DirichletData(values, fixed, nodes, snapped)
