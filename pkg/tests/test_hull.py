"""
Tests for convex hulls and the convexity deficit.
"""

import pytest

from fblab.errors import EmptyRegionError
from fblab.grid_core.grid import Grid
from fblab.grid_core.region import Region, containment_gap, rasterize
from fblab.grid_core.shapes import Disk, LShape, Square
from fblab.geomlab.hull import convex_hull, convexity_deficit, hull_geometry


@pytest.fixture
def grid():
    return Grid(64, 2.0)


def test_convex_regions_have_no_deficit(grid):
    assert convexity_deficit(rasterize(Disk(1.0), grid)) < 1e-2
    assert convexity_deficit(rasterize(Square(2.0), grid)) < 1e-2


def test_lshape_deficit(grid):
    assert convexity_deficit(rasterize(LShape(2.0, 2.0, 1.0), grid)) == pytest.approx(1 / 6, abs=0.02)


def test_hull_contains_region(grid):
    region = rasterize(LShape(2.0, 2.0, 1.0), grid)
    hull = convex_hull(region)
    assert containment_gap(hull, region) == 0.0
    assert hull.area == pytest.approx(3.5, rel=0.03)
    assert hull_geometry(region).area == pytest.approx(3.5, rel=0.03)


def test_hull_of_empty_region(grid):
    with pytest.raises(EmptyRegionError):
        convex_hull(Region.empty(grid))
    with pytest.raises(EmptyRegionError):
        convexity_deficit(Region.empty(grid))
