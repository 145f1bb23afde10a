"""
Tests for boundary growth and gradient convexity.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.grid_core.grid import Grid, ScalarField
from fblab.plap.hopf import gradient_convexity_check, hopf_growth_fit, oscillation
from fblab.reporting import Status


@pytest.fixture
def cone():
    """1 on r <= 1, 0 on r >= 2, linear in between; 1 and 2 are grid nodes."""
    grid = Grid(60, 3.0)
    return ScalarField.from_function(grid, lambda x, y: np.clip(2.0 - np.hypot(x, y), 0.0, 1.0))


def test_oscillation_of_a_linear_ramp(cone):
    assert oscillation(cone, np.array([2.0, 0.0]), 0.4) == pytest.approx(0.4, abs=1e-9)


def test_unit_slope_on_outer_boundary(cone):
    h = cone.grid.h
    report = hopf_growth_fit(cone, (2.0, 0.0), [k * h for k in (2, 3, 4, 6, 8)], expected_slope=1.0)
    assert report.passed
    assert report.values["slope"].value == pytest.approx(1.0, rel=1e-3)
    assert report.metadata["oriented"] == "up"


def test_inner_boundary_flips_orientation(cone):
    h = cone.grid.h
    report = hopf_growth_fit(cone, (1.0, 0.0), [k * h for k in (2, 3, 4)])
    assert report.passed
    assert report.metadata["oriented"] == "down"


def test_single_radius_is_skipped(cone):
    report = hopf_growth_fit(cone, (2.0, 0.0), [0.3])
    assert report.status == Status.SKIPPED
    assert "insufficient data" in report.metadata["skip_reason"]


def test_hopf_argument_errors(cone):
    with pytest.raises(PreconditionError):
        hopf_growth_fit(cone, (2.0, 0.0), [0.5, 1.5])
    with pytest.raises(PreconditionError):
        hopf_growth_fit(cone, (2.0, 0.0), [0.2, 0.3], orientation="sideways")
    with pytest.raises(PreconditionError):
        hopf_growth_fit(cone, (2.0, 0.0), [-0.1, 0.3])


def test_flat_side_with_convex_inverse_gradient():
    grid = Grid(64, 3.0)
    u = ScalarField.from_function(grid, lambda x, y: (y + 1.5) / (1.0 + 0.1 * x ** 2))
    report = gradient_convexity_check(u, [(-1.5, -1.5), (1.5, -1.5)])
    assert report.passed
    assert report.values["max_inverse_gradient"].value == pytest.approx(1.0 + 0.1 * 1.2 ** 2, rel=1e-3)


def test_flat_side_with_concave_inverse_gradient():
    grid = Grid(64, 3.0)
    u = ScalarField.from_function(grid, lambda x, y: (y + 1.5) * (1.0 + 0.1 * x ** 2))
    report = gradient_convexity_check(u, [(-1.5, -1.5), (1.5, -1.5)])
    assert not report.passed


def test_degenerate_segment():
    grid = Grid(32, 3.0)
    u = ScalarField.from_function(grid, lambda x, y: y + 1.5)
    with pytest.raises(PreconditionError):
        gradient_convexity_check(u, [(0.0, -1.5), (0.0, -1.5)])
