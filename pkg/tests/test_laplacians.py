"""
Tests for the q-Laplacian sign check.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.grid_core.grid import Grid, ScalarField
from fblab.grid_core.region import rasterize
from fblab.grid_core.shapes import Disk, LShape
from fblab.plap.laplacians import interior_nodes, q_laplacian, q_laplacian_sign_check
from fblab.plap.radial import radial_potential
from fblab.plap.solver import Ring


@pytest.fixture(scope="module")
def grid():
    return Grid(64, 3.0)


@pytest.fixture(scope="module")
def ring(grid):
    return Ring(rasterize(Disk(1.0), grid), rasterize(Disk(2.5), grid))


def potential(grid, p):
    return ScalarField.from_function(
        grid, lambda x, y: radial_potential(1.0, 2.5, p, 2, np.clip(np.hypot(x, y), 1.0, 2.5))
    )


def test_interior_nodes_keep_their_distance(grid, ring):
    nodes = interior_nodes(ring)
    x, y = grid.node_coords()
    r = np.hypot(x, y)[nodes]
    assert r.min() > 1.0 + 3 * grid.h - 1e-12
    assert r.max() < 2.5 - 3 * grid.h + 1e-12


def test_q_laplacian_of_a_linear_function(grid):
    u = ScalarField.from_function(grid, lambda x, y: 2.0 * x + y)
    values, _, norm = q_laplacian(u, 3.0)
    assert np.allclose(values, 0.0)
    assert np.allclose(norm, np.sqrt(5.0))


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
@pytest.mark.parametrize("ratio", [0.75, 1.0, 2.0])
def test_sign_of_q_laplacian_on_radial_potentials(grid, ring, p, ratio):
    q = max(ratio * p, 1.1)
    report = q_laplacian_sign_check(potential(grid, p), p, q, ring)
    assert report.passed, report.values
    expected = "zero" if ratio == 1.0 else ("nonpositive" if ratio < 1 else "nonnegative")
    assert report.metadata["expected_sign"] == expected


def test_mislabelled_exponent_fails(grid, ring):
    # the 3-Laplacian of a harmonic potential is positive, so claiming p = 4 must fail
    report = q_laplacian_sign_check(potential(grid, 2.0), 4.0, 3.0, ring)
    assert not report.passed
    assert report.margin < 0


def test_nonconvex_ring_is_rejected(grid):
    ring = Ring(rasterize(Disk(0.3), grid), rasterize(LShape(4.0, 4.0, 2.0), grid))
    with pytest.raises(PreconditionError):
        q_laplacian_sign_check(potential(grid, 2.0), 2.0, 2.0, ring)


def test_q_must_exceed_one(grid, ring):
    with pytest.raises(PreconditionError):
        q_laplacian_sign_check(potential(grid, 2.0), 2.0, 1.0, ring)
