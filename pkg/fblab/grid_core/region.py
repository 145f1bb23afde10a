"""
Regions on a grid: signed distance at nodes, cell mask and interface contour.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Tuple

import numpy as np
import shapely
from scipy import ndimage
from shapely.geometry import LinearRing, MultiLineString
from skimage import measure as skmeasure

from ..errors import EmptyRegionError, PreconditionError, ShapeSpecError
from .grid import Grid, ScalarField
from .shapes import GeometryShape, Shape

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Region:
    """A subset of the grid box.

    ``phi`` is sampled at nodes and is negative inside (a signed distance for
    rasterized shapes, any level-set function otherwise). ``mask`` marks
    cells whose center is inside. Contours are closed polylines in physical
    coordinates, oriented with the region on their left, so outer boundaries
    run counterclockwise and holes clockwise.
    """
    grid: Grid
    phi: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        mask = np.array(self.mask, dtype=bool)
        if phi.shape != self.grid.shape:
            raise PreconditionError(f"level-set shape {phi.shape} does not match grid {self.grid.shape}")
        if mask.shape != (self.grid.n, self.grid.n):
            raise PreconditionError(f"mask shape {mask.shape} does not match grid cells")
        phi.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "mask", mask)

    @classmethod
    def from_phi(cls, grid: Grid, phi: np.ndarray) -> "Region":
        """Region ``{phi < 0}``; a cell is inside when the mean of its corners is negative."""
        phi = np.asarray(phi, dtype=float)
        centers = 0.25 * (phi[:-1, :-1] + phi[1:, :-1] + phi[:-1, 1:] + phi[1:, 1:])
        return cls(grid, phi, centers < 0)

    @classmethod
    def empty(cls, grid: Grid) -> "Region":
        return cls(grid, np.full(grid.shape, 2.0 * grid.radius), np.zeros((grid.n, grid.n), dtype=bool))

    @property
    def is_empty(self) -> bool:
        return not self.mask.any()

    @property
    def inside_nodes(self) -> np.ndarray:
        return self.phi < 0

    @cached_property
    def contours(self) -> List[np.ndarray]:
        return extract_contours(self.grid, self.phi)

    @property
    def area(self) -> float:
        return float(self.mask.sum()) * self.grid.h ** 2

    @property
    def perimeter(self) -> float:
        return float(sum(loop_length(loop) for loop in self.contours))

    def offset(self, distance: float) -> "Region":
        """Shift the zero level by ``distance`` (a dilation when ``phi`` is a distance)."""
        return Region.from_phi(self.grid, self.phi - distance)

    def touches_box(self) -> bool:
        return bool(self.mask[0, :].any() or self.mask[-1, :].any() or self.mask[:, 0].any() or self.mask[:, -1].any())

    def geometry(self):
        """Shapely polygon(s) bounded by the contours."""
        outer, holes = [], []
        for loop in self.contours:
            (outer if signed_area(loop) > 0 else holes).append(loop)
        polygons = []
        for ring in outer:
            polygon = shapely.Polygon(ring)
            inner = [hole for hole in holes if polygon.contains(shapely.Point(hole[0]))]
            polygons.append(shapely.Polygon(ring, inner))
        return shapely.MultiPolygon(polygons) if len(polygons) != 1 else polygons[0]


def loop_length(loop: np.ndarray) -> float:
    closed = np.vstack([loop, loop[:1]])
    return float(np.linalg.norm(np.diff(closed, axis=0), axis=1).sum())


def signed_area(loop: np.ndarray) -> float:
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def extract_contours(grid: Grid, phi: np.ndarray) -> List[np.ndarray]:
    """Marching-squares zero level of ``phi``, closed against the box.

    The node array is padded with one ring of positive values so that regions
    touching the box boundary still produce closed loops; the padded crossings
    are clipped back onto the box.
    """
    padded = np.pad(phi, 1, constant_values=grid.h)
    loops = []
    field = ScalarField(grid, phi)
    for raw in skmeasure.find_contours(padded, 0.0):
        xy = np.clip(grid.index_to_xy(raw - 1.0), -grid.radius, grid.radius)
        if np.allclose(xy[0], xy[-1]):
            xy = xy[:-1]
        keep = np.ones(len(xy), dtype=bool)
        keep[1:] = np.linalg.norm(np.diff(xy, axis=0), axis=1) > 1e-12
        xy = xy[keep]
        if len(xy) < 3:
            continue
        loops.append(_orient(xy, field))
    return loops


def _orient(loop: np.ndarray, field: ScalarField) -> np.ndarray:
    nxt = np.roll(loop, -1, axis=0)
    k = int(np.argmax(np.linalg.norm(nxt - loop, axis=1)))
    tangent = nxt[k] - loop[k]
    tangent = tangent / np.linalg.norm(tangent)
    left = np.array([-tangent[1], tangent[0]])
    mid = 0.5 * (loop[k] + nxt[k])
    step = 0.25 * field.grid.h
    phi_left, phi_right = field.sample(np.array([mid + step * left, mid - step * left]))
    if phi_left > phi_right:
        return loop[::-1].copy()
    return loop


def rasterize(shape: Shape, grid: Grid) -> Region:
    """Sample a shape onto the grid.

    Raises:
        ShapeSpecError: If the shape leaves the open box or covers no cell center
    """
    geom = shape.geometry()
    if geom.is_empty or geom.area <= 0:
        raise ShapeSpecError("degenerate shape with zero area")
    minx, miny, maxx, maxy = geom.bounds
    if min(minx, miny) <= -grid.radius or max(maxx, maxy) >= grid.radius:
        raise ShapeSpecError(f"shape with bounds {geom.bounds} does not fit strictly inside the box of half-width {grid.radius}")
    x, y = grid.node_coords()
    cx, cy = grid.cell_centers()
    region = Region(grid, shape.signed_distance(x, y), shape.contains(cx, cy))
    if region.is_empty:
        raise ShapeSpecError("shape is smaller than one grid cell")
    return region


def rasterize_geometry(geom, grid: Grid) -> Region:
    return rasterize(GeometryShape(geom), grid)


def measure(region: Region) -> Tuple[float, float]:
    """Return ``(area, perimeter)``; the perimeter is the interface polyline length."""
    if region.is_empty:
        return 0.0, 0.0
    return region.area, region.perimeter


def _curves(region: Region):
    if region.is_empty or not region.contours:
        raise EmptyRegionError("Hausdorff distance needs two nonempty regions")
    return MultiLineString([LinearRing(loop) for loop in region.contours])


def _directed(points: np.ndarray, curves) -> float:
    return float(np.max(shapely.distance(curves, shapely.points(points))))


def hausdorff_distance(a: Region, b: Region) -> float:
    """Symmetric Hausdorff distance between the contours of two regions."""
    if a.grid != b.grid:
        raise PreconditionError("regions live on different grids")
    return loops_hausdorff(a, b)


def loops_hausdorff(a: Region, b: Region) -> float:
    """Hausdorff distance between contours in physical coordinates, grids may differ."""
    curves_a, curves_b = _curves(a), _curves(b)
    points_a = np.vstack(a.contours)
    points_b = np.vstack(b.contours)
    return max(_directed(points_a, curves_b), _directed(points_b, curves_a))


def contour_distance(a: Region, b: Region) -> float:
    """Smallest distance between the contours of two regions."""
    return float(shapely.distance(_curves(a), _curves(b)))


def containment_gap(a: Region, b: Region) -> float:
    """Largest distance from a cell of ``b`` to the cells of ``a`` (zero when b is inside a)."""
    if a.grid != b.grid:
        raise PreconditionError("regions live on different grids")
    if b.is_empty:
        return 0.0
    if a.is_empty:
        return float("inf")
    distance = ndimage.distance_transform_edt(~a.mask, sampling=a.grid.h)
    return float(np.max(distance[b.mask]))


def region_contains(a: Region, b: Region, slack: float = 0.0) -> bool:
    """True iff every cell of ``b`` lies within ``slack`` of a cell of ``a``."""
    return containment_gap(a, b) <= slack + 1e-12
