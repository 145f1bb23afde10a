"""
Tests for shape specs.
"""

import numpy as np
import pytest

from fblab.errors import ShapeSpecError
from fblab.grid_core.shapes import Disk, Ellipse, LShape, Rect, Union, parse_shape_spec


@pytest.mark.parametrize("spec,expected", [
    ("disk:1", Disk(1.0)),
    ("disk:1@0.3,-0.2", Disk(1.0, (0.3, -0.2))),
    ("square:2", Rect(2.0, 2.0)),
    ("rect:3,1", Rect(3.0, 1.0)),
    ("ellipse:1.5,1", Ellipse(1.5, 1.0)),
    ("lshape:2,2,1", LShape(2.0, 2.0, 1.0)),
])
def test_parse_shape_spec(spec, expected):
    assert parse_shape_spec(spec) == expected


def test_parse_union():
    shape = parse_shape_spec("union(square:1@-0.8,0;square:1@0.8,0)")
    assert isinstance(shape, Union)
    assert len(shape.parts) == 2
    assert shape.geometry().area == pytest.approx(2.0)


@pytest.mark.parametrize("spec", [
    "blob:1",
    "disk:1,2",
    "disk:-1",
    "disk:x",
    "rect:1",
    "lshape:2,2,2",
    "disk:1@0.5",
    "union(disk:1)",
    "disk",
])
def test_parse_rejects_bad_specs(spec):
    with pytest.raises(ShapeSpecError):
        parse_shape_spec(spec)


def test_shape_spec_error_is_a_value_error():
    with pytest.raises(ValueError):
        parse_shape_spec("triangle:1")


def test_disk_signed_distance_is_exact():
    disk = Disk(1.0, (0.5, 0.0))
    d = disk.signed_distance(np.array([0.5, 2.5]), np.array([0.0, 0.0]))
    assert np.allclose(d, [-1.0, 1.0])


def test_generic_signed_distance_sign():
    square = Rect(2.0, 2.0)
    d = square.signed_distance(np.array([0.0, 2.0]), np.array([0.0, 0.0]))
    assert d[0] == pytest.approx(-1.0)
    assert d[1] == pytest.approx(1.0)


def test_lshape_notch_is_upper_right():
    shape = LShape(2.0, 2.0, 1.0)
    inside = shape.contains(np.array([0.5, -0.5]), np.array([0.5, 0.5]))
    assert list(inside) == [False, True]
    assert shape.geometry().area == pytest.approx(3.0)
