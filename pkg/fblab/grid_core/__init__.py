"""
Grid fields, regions, shapes and geometric measures.
"""

from .grid import Grid, ScalarField, gradient, hessian
from .region import (
    Region,
    containment_gap,
    contour_distance,
    extract_contours,
    hausdorff_distance,
    loops_hausdorff,
    measure,
    rasterize,
    rasterize_geometry,
    region_contains,
)
from .shapes import Disk, Ellipse, LShape, Polygon, Rect, Shape, Square, Union, parse_shape_spec

__all__ = [
    "Grid",
    "ScalarField",
    "gradient",
    "hessian",
    "Region",
    "containment_gap",
    "contour_distance",
    "extract_contours",
    "hausdorff_distance",
    "loops_hausdorff",
    "measure",
    "rasterize",
    "rasterize_geometry",
    "region_contains",
    "Disk",
    "Ellipse",
    "LShape",
    "Polygon",
    "Rect",
    "Shape",
    "Square",
    "Union",
    "parse_shape_spec",
]
