"""
Tests for grids and scalar fields.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.grid_core.grid import Grid, ScalarField, gradient, hessian


def test_grid_geometry():
    grid = Grid(32, 2.0)
    assert grid.h == pytest.approx(0.125)
    assert grid.shape == (33, 33)
    assert grid.axis[0] == -2.0 and grid.axis[-1] == 2.0
    assert grid.center_axis[0] == pytest.approx(-2.0 + 0.0625)
    x, y = grid.node_coords()
    assert x[1, 0] > x[0, 0]
    assert y[0, 1] > y[0, 0]


def test_grid_rejects_coarse_or_degenerate():
    with pytest.raises(PreconditionError):
        Grid(8)
    with pytest.raises(PreconditionError):
        Grid(32, 0.0)


def test_index_to_xy_and_box_distance():
    grid = Grid(16, 4.0)
    assert np.allclose(grid.index_to_xy(np.array([8.0, 8.0])), [0.0, 0.0])
    distances = grid.box_distance(np.array([[0.0, 0.0], [3.0, -1.0], [4.0, 0.0]]))
    assert np.allclose(distances, [4.0, 1.0, 0.0])


def test_scaled_and_refined():
    grid = Grid(32, 2.0)
    assert grid.scaled(2.0) == Grid(32, 4.0)
    assert grid.refined().h == pytest.approx(grid.h / 2)


def test_scalar_field_is_read_only():
    grid = Grid(16, 1.0)
    field = ScalarField(grid, np.zeros(grid.shape))
    with pytest.raises(ValueError):
        field.values[0, 0] = 1.0
    assert not field.fixed.any()


def test_scalar_field_validates_shape_and_values():
    grid = Grid(16, 1.0)
    with pytest.raises(PreconditionError):
        ScalarField(grid, np.zeros((3, 3)))
    values = np.zeros(grid.shape)
    values[2, 2] = np.nan
    with pytest.raises(PreconditionError):
        ScalarField(grid, values)


def test_sample_is_exact_for_bilinear_functions():
    grid = Grid(16, 1.0)
    field = ScalarField.from_function(grid, lambda x, y: 2.0 * x - y + 0.5 * x * y)
    points = np.array([[0.13, -0.41], [0.7, 0.2]])
    expected = 2.0 * points[:, 0] - points[:, 1] + 0.5 * points[:, 0] * points[:, 1]
    assert np.allclose(field.sample(points), expected)


def test_sample_clamps_outside_points():
    grid = Grid(16, 1.0)
    field = ScalarField.from_function(grid, lambda x, y: x)
    assert field.sample(np.array([[5.0, 0.0]]))[0] == pytest.approx(1.0)


def test_gradient_and_hessian_of_quadratic():
    grid = Grid(32, 1.0)
    field = ScalarField.from_function(grid, lambda x, y: x ** 2 + 3.0 * x * y)
    grad = gradient(field)
    assert grad.shape == grid.shape + (2,)
    i = j = 16
    x, y = grid.axis[i], grid.axis[j + 4]
    assert grad[i, j + 4, 0] == pytest.approx(2 * x + 3 * y)
    assert grad[i, j + 4, 1] == pytest.approx(3 * x)
    hess = hessian(field)
    assert np.allclose(hess[i, j], [[2.0, 3.0], [3.0, 0.0]])
