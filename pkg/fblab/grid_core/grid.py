"""
Uniform grids on the box [-R, R]^2 and scalar fields sampled on their nodes.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from ..errors import PreconditionError

logger = logging.getLogger(__name__)

MIN_CELLS = 16


@dataclass(frozen=True)
class Grid:
    """Square uniform grid with ``n`` cells per axis on [-radius, radius]^2.

    Nodes are indexed ``[i, j]`` with ``i`` along x and ``j`` along y, so
    node arrays have shape ``(n + 1, n + 1)`` and cell arrays ``(n, n)``.
    """
    n: int
    radius: float = 4.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_CELLS:
            raise PreconditionError(f"grid needs at least {MIN_CELLS} cells per axis, got {self.n}")
        if not self.radius > 0:
            raise PreconditionError(f"grid half-width must be positive, got {self.radius}")

    @property
    def h(self) -> float:
        return 2.0 * self.radius / self.n

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.n + 1, self.n + 1)

    @property
    def axis(self) -> np.ndarray:
        """Node coordinates along one axis."""
        return np.linspace(-self.radius, self.radius, self.n + 1)

    @property
    def center_axis(self) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return -self.radius + (np.arange(self.n) + 0.5) * self.h

    def node_coords(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axis, self.axis, indexing="ij")

    def cell_centers(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.center_axis, self.center_axis, indexing="ij")

    def index_to_xy(self, index_coords: np.ndarray) -> np.ndarray:
        """Map fractional node indices ``(i, j)`` to physical ``(x, y)``."""
        return -self.radius + np.asarray(index_coords, dtype=float) * self.h

    def box_distance(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the boundary of the box (inside points)."""
        points = np.asarray(points, dtype=float)
        return self.radius - np.max(np.abs(points), axis=-1)

    def scaled(self, factor: float) -> "Grid":
        """Same cell count on a box dilated by ``factor``."""
        return Grid(self.n, self.radius * factor)

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.n * factor, self.radius)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real values on the nodes of a grid.

    ``fixed`` flags Dirichlet nodes that solvers never modify. ``nodes`` holds
    the node positions used by the solver mesh when they differ from the
    grid nodes (interface snapping); ``None`` means the plain grid.
    """
    grid: Grid
    values: np.ndarray
    fixed: Optional[np.ndarray] = None
    nodes: Optional[np.ndarray] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.shape:
            raise PreconditionError(f"field shape {values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("field values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        fixed = np.zeros(self.grid.shape, dtype=bool) if self.fixed is None else np.array(self.fixed, dtype=bool)
        if fixed.shape != self.grid.shape:
            raise PreconditionError("boundary flag shape does not match grid")
        fixed.setflags(write=False)
        object.__setattr__(self, "fixed", fixed)

        if self.nodes is not None:
            nodes = np.array(self.nodes, dtype=float)
            if nodes.shape != self.grid.shape + (2,):
                raise PreconditionError("node positions must have shape (n+1, n+1, 2)")
            nodes.setflags(write=False)
            object.__setattr__(self, "nodes", nodes)

    @classmethod
    def from_function(cls, grid: Grid, func) -> "ScalarField":
        """Sample ``func(x, y)`` on the grid nodes."""
        x, y = grid.node_coords()
        return cls(grid, np.broadcast_to(func(x, y), grid.shape))

    @property
    def node_positions(self) -> np.ndarray:
        if self.nodes is not None:
            return self.nodes
        x, y = self.grid.node_coords()
        return np.stack([x, y], axis=-1)

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.grid, values, self.fixed, self.nodes)

    def sample(self, points: np.ndarray) -> np.ndarray:
        """Bilinear interpolation at physical points (clamped to the box)."""
        points = np.clip(np.asarray(points, dtype=float), -self.grid.radius, self.grid.radius)
        interpolator = RegularGridInterpolator((self.grid.axis, self.grid.axis), self.values)
        return interpolator(points.reshape(-1, 2)).reshape(points.shape[:-1])


def gradient(field: ScalarField) -> np.ndarray:
    """Per-node gradient, centered inside and one-sided on the box boundary.

    Returns:
        Array of shape ``(n + 1, n + 1, 2)``.
    """
    h = field.grid.h
    gx, gy = np.gradient(field.values, h, h)
    return np.stack([gx, gy], axis=-1)


def hessian(field: ScalarField) -> np.ndarray:
    """Per-node Hessian from repeated centered differences, shape ``(n+1, n+1, 2, 2)``."""
    h = field.grid.h
    gx, gy = np.gradient(field.values, h, h)
    gxx, gxy = np.gradient(gx, h, h)
    gyx, gyy = np.gradient(gy, h, h)
    off = 0.5 * (gxy + gyx)
    return np.stack([np.stack([gxx, off], axis=-1), np.stack([off, gyy], axis=-1)], axis=-2)

