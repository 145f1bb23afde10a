"""
Shape specifications for the fixed body K and for initial or trial domains.

Shapes are thin wrappers around shapely geometries; ``parse_shape_spec``
implements the command-line grammar::

    disk:r[@cx,cy]   square:s[@cx,cy]   rect:w,h[@cx,cy]
    ellipse:a,b[@cx,cy]   lshape:w,h,notch[@cx,cy]   union(spec;spec;...)
"""

import logging
import re
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np
import shapely
from shapely import affinity
from shapely.geometry import Point, Polygon as ShapelyPolygon, box
from shapely.ops import unary_union

from ..errors import ShapeSpecError

logger = logging.getLogger(__name__)

# Segments per quarter circle; chord error r * (1 - cos(pi / 4 / QUAD_SEGS)).
QUAD_SEGS = 256


class Shape:
    """Base class; subclasses build a shapely geometry."""

    def geometry(self):
        raise NotImplementedError

    def signed_distance(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Signed distance to the boundary, negative inside."""
        geom = self.geometry()
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        points = shapely.points(x.ravel(), y.ravel())
        dist = shapely.distance(geom.boundary, points)
        inside = shapely.contains_xy(geom, x.ravel(), y.ravel())
        return np.where(inside, -dist, dist).reshape(x.shape)

    def contains(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return shapely.contains_xy(self.geometry(), x.ravel(), y.ravel()).reshape(x.shape)


@dataclass(frozen=True)
class Disk(Shape):
    r: float
    center: Tuple[float, float] = (0.0, 0.0)

    def geometry(self):
        return Point(self.center).buffer(self.r, quad_segs=QUAD_SEGS)

    def signed_distance(self, x, y):
        return np.hypot(np.asarray(x) - self.center[0], np.asarray(y) - self.center[1]) - self.r

    def contains(self, x, y):
        return self.signed_distance(x, y) < 0


@dataclass(frozen=True)
class Rect(Shape):
    width: float
    height: float
    center: Tuple[float, float] = (0.0, 0.0)

    def geometry(self):
        cx, cy = self.center
        return box(cx - self.width / 2, cy - self.height / 2, cx + self.width / 2, cy + self.height / 2)


def Square(side: float, center: Tuple[float, float] = (0.0, 0.0)) -> Rect:
    return Rect(side, side, center)


@dataclass(frozen=True)
class Ellipse(Shape):
    a: float
    b: float
    center: Tuple[float, float] = (0.0, 0.0)

    def geometry(self):
        unit = Point(0.0, 0.0).buffer(1.0, quad_segs=QUAD_SEGS)
        return affinity.translate(affinity.scale(unit, self.a, self.b, origin=(0, 0)), *self.center)


@dataclass(frozen=True)
class Polygon(Shape):
    vertices: Tuple[Tuple[float, float], ...]

    def geometry(self):
        return ShapelyPolygon(self.vertices)


@dataclass(frozen=True)
class LShape(Shape):
    """``width x height`` rectangle with a ``notch x notch`` square cut from its upper-right corner."""
    width: float
    height: float
    notch: float
    center: Tuple[float, float] = (0.0, 0.0)

    def geometry(self):
        cx, cy = self.center
        x0, x1 = cx - self.width / 2, cx + self.width / 2
        y0, y1 = cy - self.height / 2, cy + self.height / 2
        return box(x0, y0, x1, y1).difference(box(x1 - self.notch, y1 - self.notch, x1, y1))


@dataclass(frozen=True)
class Union(Shape):
    parts: Tuple[Shape, ...] = field(default_factory=tuple)

    def geometry(self):
        return unary_union([part.geometry() for part in self.parts])


@dataclass(frozen=True)
class GeometryShape(Shape):
    """Adapter for an arbitrary shapely polygon (hulls, descent snapshots)."""
    geom: object

    def geometry(self):
        return self.geom


def _numbers(text: str, spec: str) -> List[float]:
    parts = [part.strip() for part in text.split(",") if part.strip()]
    try:
        return [float(part) for part in parts]
    except ValueError:
        raise ShapeSpecError(f"non-numeric parameter in shape spec '{spec}'")


def _split_top_level(body: str) -> List[str]:
    parts, depth, current = [], 0, []
    for char in body:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == ";" and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(char)
    parts.append("".join(current))
    return [part.strip() for part in parts if part.strip()]


def parse_shape_spec(spec: str) -> Shape:
    """Parse a shape specification string.

    Args:
        spec: e.g. ``disk:1``, ``disk:1@0.3,0``, ``lshape:2,2,1``,
            ``union(square:1@-1,0;square:1@1,0)``

    Returns:
        The corresponding Shape

    Raises:
        ShapeSpecError: If the text does not follow the grammar
    """
    spec = spec.strip()
    if spec.startswith("union(") and spec.endswith(")"):
        members = _split_top_level(spec[len("union("):-1])
        if len(members) < 2:
            raise ShapeSpecError(f"union needs at least two members: '{spec}'")
        return Union(tuple(parse_shape_spec(member) for member in members))

    match = re.fullmatch(r"(\w+):([^@]+)(?:@(.+))?", spec)
    if not match:
        raise ShapeSpecError(f"cannot parse shape spec '{spec}'")
    kind, params_text, center_text = match.groups()
    params = _numbers(params_text, spec)
    center = (0.0, 0.0)
    if center_text is not None:
        coords = _numbers(center_text, spec)
        if len(coords) != 2:
            raise ShapeSpecError(f"center must be 'cx,cy' in '{spec}'")
        center = (coords[0], coords[1])

    expected = {"disk": 1, "square": 1, "rect": 2, "ellipse": 2, "lshape": 3}
    if kind not in expected:
        raise ShapeSpecError(f"unknown shape kind '{kind}' in '{spec}'")
    if len(params) != expected[kind]:
        raise ShapeSpecError(f"'{kind}' takes {expected[kind]} parameter(s), got {len(params)}")
    if any(value <= 0 for value in params):
        raise ShapeSpecError(f"shape parameters must be positive in '{spec}'")

    if kind == "disk":
        return Disk(params[0], center)
    if kind == "square":
        return Square(params[0], center)
    if kind == "rect":
        return Rect(params[0], params[1], center)
    if kind == "ellipse":
        return Ellipse(params[0], params[1], center)
    width, height, notch = params
    if notch >= min(width, height):
        raise ShapeSpecError(f"notch must be smaller than both sides in '{spec}'")
    return LShape(width, height, notch, center)


def shape_union(shapes: Sequence[Shape]) -> Shape:
    return Union(tuple(shapes))
