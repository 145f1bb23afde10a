"""
Convex hulls of grid regions.
"""

import logging

import numpy as np
import shapely
from shapely.geometry import MultiPoint

from ..errors import EmptyRegionError
from ..grid_core.region import Region

logger = logging.getLogger(__name__)


def hull_geometry(region: Region):
    """Shapely polygon hull of the region's contour vertices."""
    if region.is_empty or not region.contours:
        raise EmptyRegionError("convex hull of an empty region")
    return MultiPoint(np.vstack(region.contours)).convex_hull


def convex_hull(region: Region) -> Region:
    """Hull of the contour vertices, rasterized; always contains ``region``."""
    hull = hull_geometry(region)
    grid = region.grid
    x, y = grid.node_coords()
    cx, cy = grid.cell_centers()
    dist = shapely.distance(hull.boundary, shapely.points(x.ravel(), y.ravel())).reshape(x.shape)
    inside = shapely.contains_xy(hull, x.ravel(), y.ravel()).reshape(x.shape)
    phi = np.minimum(np.where(inside, -dist, dist), region.phi)
    mask = shapely.contains_xy(hull, cx.ravel(), cy.ravel()).reshape(cx.shape) | region.mask
    return Region(grid, phi, mask)


def convexity_deficit(region: Region) -> float:
    """Relative area gap ``(area(hull) - area) / area``, zero for convex regions."""
    if region.is_empty:
        raise EmptyRegionError("convexity deficit of an empty region")
    hull = convex_hull(region)
    deficit = (hull.area - region.area) / region.area
    logger.debug(f"Convexity deficit {deficit:.4g} (area {region.area:.4g}, hull {hull.area:.4g})")
    return float(deficit)
