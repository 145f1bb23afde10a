"""
Tests for the total energy and the free boundary residual.
"""

import math

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.fbmin.energy import (
    fb_graph_curvature_check,
    fb_residual,
    graph_curvature,
    hull_free_boundary_inequality,
    total_energy,
)
from fblab.fbmin.oracle import radial_optimal_radius
from fblab.grid_core.grid import Grid
from fblab.grid_core.region import rasterize
from fblab.grid_core.shapes import Disk, Rect
from fblab.plap.radial import radial_energy
from fblab.plap.solver import PLapConfig


@pytest.fixture(scope="module")
def grid():
    return Grid(128, 2.5)


@pytest.fixture(scope="module")
def optimum(grid):
    rho, _ = radial_optimal_radius(1.0, 2.0)
    return rasterize(Disk(1.0), grid), rasterize(Disk(rho), grid)


def test_total_energy_of_a_disk(optimum):
    K, omega = optimum
    terms = total_energy(K, omega, 2.0)
    rho, energy = radial_optimal_radius(1.0, 2.0)
    assert terms.perimeter == pytest.approx(2 * math.pi * rho, rel=1e-3)
    assert terms.total == pytest.approx(energy, rel=0.01)
    assert terms.total == pytest.approx(terms.dirichlet + terms.perimeter)


def test_energy_prefers_the_optimal_radius(grid):
    K = rasterize(Disk(1.0), grid)
    energies = [total_energy(K, rasterize(Disk(r), grid), 2.0).total for r in (1.5, 2.0207, 2.4)]
    assert energies[1] < energies[0] and energies[1] < energies[2]
    assert radial_energy(1.0, 2.0207, 2.0, 2) < radial_energy(1.0, 1.5, 2.0, 2)


def test_residual_vanishes_at_the_optimum(optimum):
    K, omega = optimum
    residual = fb_residual(K, omega, 2.0)
    assert residual.max_relative < 0.1
    assert residual.mean_curvature == pytest.approx(1 / 2.0207, rel=0.02)
    assert not residual.on_box.any()
    assert residual.stats()["box_vertices"] == 0


def test_residual_sign_away_from_the_optimum(grid):
    K = rasterize(Disk(1.0), grid)
    small = fb_residual(K, rasterize(Disk(1.5), grid), 2.0)
    large = fb_residual(K, rasterize(Disk(2.4), grid), 2.0)
    # too small a domain pushes outward, too large a domain pulls inward
    assert np.nanmean(small.residual) > 0
    assert np.nanmean(large.residual) < 0


def test_residual_rejects_touching_boundaries(grid):
    K = rasterize(Disk(1.0), grid)
    with pytest.raises(PreconditionError):
        fb_residual(K, rasterize(Disk(1.0 + 0.5 * grid.h), grid), 2.0)


def test_box_vertices_carry_no_residual(grid):
    K = rasterize(Disk(1.0), grid)
    omega = rasterize(Rect(4.9, 3.0), grid)
    residual = fb_residual(K, omega, 2.0)
    assert residual.on_box.any()
    assert np.all(np.isnan(residual.residual[residual.on_box]))
    assert np.all(np.isfinite(residual.residual[residual.interior]))
    assert residual.stats()["box_vertices"] == int(residual.on_box.sum())


def test_graph_curvature_of_a_circle():
    theta = np.linspace(-0.3, 0.3, 41)
    points = 2.0 * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    kappa = graph_curvature(points, np.array([2.0, 0.0]), np.array([1.0, 0.0]), 0.2)
    assert kappa == pytest.approx(0.5, rel=1e-2)


def test_graph_checks_at_the_optimum(optimum):
    K, omega = optimum
    report = fb_graph_curvature_check(K, omega, 2.0)
    assert report.passed
    assert report.metadata["points"] == 16
    hull = hull_free_boundary_inequality(K, omega, 2.0)
    assert hull.passed


def test_solver_exponent_must_match(optimum):
    K, omega = optimum
    with pytest.raises(PreconditionError):
        total_energy(K, omega, 2.0, PLapConfig(p=3.0))
