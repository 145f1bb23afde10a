"""
Tests for the P1 mesh and the p-capacitary solver.
"""

import math

import numpy as np
import pytest

from fblab.errors import ConvergenceError, PreconditionError
from fblab.grid_core.grid import Grid, ScalarField
from fblab.grid_core.region import rasterize
from fblab.grid_core.shapes import Disk
from fblab.plap.mesh import build_mesh, dirichlet_data, energy, energy_gradient
from fblab.plap.radial import radial_capacity, radial_potential
from fblab.plap.solver import (
    PLapConfig,
    PLapSolver,
    Ring,
    check_nested,
    comparison_check,
    node_stars,
    p_energy,
    solve_p_capacitary,
)


@pytest.fixture
def ring():
    grid = Grid(64, 2.5)
    return rasterize(Disk(1.0), grid), rasterize(Disk(2.0), grid)


def test_mesh_covers_box():
    grid = Grid(16, 1.0)
    mesh = build_mesh(grid)
    assert mesh.triangles.shape == (2 * 16 * 16, 3)
    assert mesh.areas.sum() == pytest.approx(4.0)
    assert np.all(mesh.areas > 0)


def test_energy_of_linear_function():
    grid = Grid(16, 1.0)
    mesh = build_mesh(grid)
    u = mesh.nodes[:, 0] + 2.0 * mesh.nodes[:, 1]
    assert energy(mesh, u, 3.0, 0.0) == pytest.approx(4.0 * math.sqrt(5.0) ** 3)


def test_energy_gradient_matches_finite_differences():
    grid = Grid(16, 1.0)
    mesh = build_mesh(grid)
    rng = np.random.default_rng(1)
    u = rng.random(mesh.n_nodes)
    grad = energy_gradient(mesh, u, 3.0, 1e-2)
    k = 5 * 17 + 7
    step = 1e-6
    bumped = u.copy()
    bumped[k] += step
    lowered = u.copy()
    lowered[k] -= step
    numeric = (energy(mesh, bumped, 3.0, 1e-2) - energy(mesh, lowered, 3.0, 1e-2)) / (2 * step)
    assert grad[k] == pytest.approx(numeric, rel=1e-5)


def test_dirichlet_data_snaps_onto_interfaces(ring):
    K, Omega = ring
    data = dirichlet_data(K, Omega)
    assert data.snapped > 0
    moved = np.linalg.norm(data.nodes - np.stack(K.grid.node_coords(), axis=-1), axis=-1) > 0
    radii = np.linalg.norm(data.nodes[moved], axis=-1)
    near_one = np.abs(radii - 1.0) < 0.01
    near_two = np.abs(radii - 2.0) < 0.01
    assert np.all(near_one | near_two)
    assert np.all(data.values[K.phi < 0] == 1.0)


def test_config_validation():
    with pytest.raises(PreconditionError):
        PLapConfig(p=1.0)
    with pytest.raises(PreconditionError):
        PLapConfig(scheme="jacobi")
    with pytest.raises(PreconditionError):
        PLapConfig(eps_reg=0.0)
    with pytest.raises(PreconditionError):
        PLapConfig(max_iter=0)


def test_eps_schedule():
    solver = PLapSolver(PLapConfig(p=3.0, eps_reg=1e-4))
    assert solver.eps_schedule(0.1) == pytest.approx([1e-2, 1e-3, 1e-4])
    solver = PLapSolver(PLapConfig(p=3.0, eps_reg=1e-1))
    assert solver.eps_schedule(0.1) == pytest.approx([1e-1])


def test_check_nested(ring):
    K, Omega = ring
    check_nested(K, Omega)
    with pytest.raises(PreconditionError):
        check_nested(Omega, K)
    with pytest.raises(PreconditionError):
        check_nested(K, rasterize(Disk(2.0), Grid(32, 2.5)))


def test_harmonic_ring_matches_closed_form(ring):
    K, Omega = ring
    u = solve_p_capacitary(K, Omega, PLapConfig(p=2.0))
    points = np.array([[1.5, 0.0], [0.0, -1.25], [1.2, 1.2]])
    radii = np.linalg.norm(points, axis=1)
    expected = radial_potential(1.0, 2.0, 2.0, 2, radii)
    assert np.allclose(u.sample(points), expected, atol=0.01)
    assert p_energy(u, 2.0) == pytest.approx(radial_capacity(1.0, 2.0, 2.0, 2), rel=0.03)


def test_solution_respects_boundary_values(ring):
    K, Omega = ring
    u = solve_p_capacitary(K, Omega, PLapConfig(p=3.0))
    assert np.all(u.values >= 0.0) and np.all(u.values <= 1.0)
    assert np.all(u.values[K.phi < 0] == 1.0)
    assert np.all(u.values[Omega.phi > 0] == 0.0)
    assert p_energy(u, 3.0) == pytest.approx(radial_capacity(1.0, 2.0, 3.0, 2), rel=0.05)


def test_newton_and_gauss_seidel_agree():
    grid = Grid(16, 2.5)
    K, Omega = rasterize(Disk(0.8), grid), rasterize(Disk(2.0), grid)
    newton = solve_p_capacitary(K, Omega, PLapConfig(p=3.0, tol_rel_energy=1e-12))
    gauss_seidel = solve_p_capacitary(
        K, Omega, PLapConfig(p=3.0, scheme="colored-gs", tol_rel_energy=1e-12, max_iter=2000)
    )
    assert np.max(np.abs(newton.values - gauss_seidel.values)) < 1e-2
    assert p_energy(newton, 3.0) == pytest.approx(p_energy(gauss_seidel, 3.0), rel=1e-4)


def test_convergence_error_carries_last_iterate(ring):
    K, Omega = ring
    with pytest.raises(ConvergenceError) as info:
        solve_p_capacitary(K, Omega, PLapConfig(p=3.0, max_iter=1))
    assert info.value.last_iterate.shape == K.grid.shape
    assert info.value.residual > 0


def test_p_energy_restricted_to_domain(ring):
    K, Omega = ring
    grid = K.grid
    field = ScalarField.from_function(grid, lambda x, y: x)
    assert p_energy(field, 2.0, Omega) == pytest.approx(Omega.area)
    with pytest.raises(PreconditionError):
        p_energy(field, 1.0)


def test_ring_masks(ring):
    K, Omega = ring
    shell = Ring(K, Omega)
    assert shell.mask.sum() == Omega.mask.sum() - K.mask.sum()
    assert not shell.node_mask[K.phi < 0].any()


def test_comparison_principle_passes():
    grid = Grid(32, 2.5)
    omega = rasterize(Disk(2.0), grid)
    report = comparison_check(rasterize(Disk(0.8), grid), rasterize(Disk(1.0), grid), omega)
    assert report.passed
    assert report.check == "comparison_principle"
    with pytest.raises(PreconditionError):
        comparison_check(rasterize(Disk(1.0), grid), rasterize(Disk(0.8), grid), omega)


def test_lexicographic_sweeps_agree_with_newton():
    grid = Grid(16, 2.5)
    K, Omega = rasterize(Disk(0.8), grid), rasterize(Disk(2.0), grid)
    newton = solve_p_capacitary(K, Omega, PLapConfig(p=3.0, tol_rel_energy=1e-12))
    solver = PLapSolver(PLapConfig(p=3.0, scheme="lexicographic-gs", tol_rel_energy=1e-10, max_iter=2000))
    lexicographic = solver.solve(K, Omega)
    assert np.max(np.abs(newton.values - lexicographic.values)) < 1e-2
    assert p_energy(newton, 3.0) == pytest.approx(p_energy(lexicographic, 3.0), rel=1e-4)
    energies = solver.trace.energies
    assert all(b <= a * (1 + 1e-12) for a, b in zip(energies, energies[1:]))


def test_node_stars_list_the_incident_triangles():
    mesh = build_mesh(Grid(4, 1.0))
    stars = node_stars(mesh)
    triangles, slopes = stars[2 * 5 + 2]
    assert len(triangles) == 6
    assert slopes.shape == (6, 2)
    # the hat function of an interior node has zero mean gradient over its star
    assert np.allclose((mesh.areas[triangles][:, None] * slopes).sum(axis=0), 0.0)
    corner, _ = stars[0]
    assert len(corner) == 1
