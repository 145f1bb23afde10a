"""
Tests for the shape descent.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.fbmin.descent import MinimizeConfig, ShapeDescent, minimize, outer_loops
from fblab.fbmin.energy import fb_residual
from fblab.fbmin.oracle import radial_optimal_radius
from fblab.grid_core.region import Region, hausdorff_distance, rasterize
from fblab.grid_core.shapes import Disk
from fblab.plap.solver import PLapConfig
from fblab.reporting import Status


def test_config_validation():
    with pytest.raises(PreconditionError):
        MinimizeConfig(p=1.0)
    with pytest.raises(PreconditionError):
        MinimizeConfig(step_scale=0.0)
    with pytest.raises(PreconditionError):
        MinimizeConfig(max_outer_iter=0)
    with pytest.raises(PreconditionError):
        MinimizeConfig(smoothing_cells=0.0)
    with pytest.raises(PreconditionError):
        MinimizeConfig(p=2.0, solver=PLapConfig(p=3.0))
    assert MinimizeConfig(p=3.0).solver.p == 3.0


def test_init_must_clear_K():
    cfg = MinimizeConfig(n=48, radius=3.0, init="disk:1.1")
    with pytest.raises(PreconditionError):
        minimize(cfg)


def test_descent_decreases_energy():
    cfg = MinimizeConfig(n=48, radius=3.0, init="disk:2.5", max_outer_iter=6)
    report = minimize(cfg)
    totals = [row.total for row in report.trace]
    assert all(b <= a for a, b in zip(totals, totals[1:]))
    assert report.energy.total <= totals[0]
    assert report.omega.area < rasterize(Disk(2.5), cfg.grid).area
    assert report.clearance > cfg.clearance_cells * cfg.grid.h * 0.9
    assert outer_loops(report.omega) == 1


def test_descent_from_the_optimum_converges():
    cfg = MinimizeConfig(n=64, radius=3.0, init="disk:2.02", tol_fb_residual=0.3, tol_energy_stall=1e-2,
                         max_outer_iter=10)
    report = minimize(cfg)
    assert report.converged, report.message
    assert not report.topology_changed
    result = report.to_report()
    assert result.check == "free_boundary_minimization"
    assert result.passed
    assert result.values["iterations"].value == len(report.trace)


def test_smoothed_velocity_is_uniform_on_a_disk():
    cfg = MinimizeConfig(n=96, radius=4.0, init="disk:2.6")
    K = rasterize(Disk(1.0), cfg.grid)
    descent = ShapeDescent(cfg, K, rasterize(Disk(2.6), cfg.grid))
    omega = descent.redistanced(descent.init.phi)
    speed = descent.velocity(fb_residual(K, omega, 2.0))
    # (p - 1)|Du|^p - curvature of the annulus potential at rho = 2.6
    expected = 1.0 / (2.6 * np.log(2.6)) ** 2 - 1.0 / 2.6
    assert np.all(speed < 0)
    assert np.mean(speed) == pytest.approx(expected, rel=0.15)
    assert np.std(speed) < 0.2 * abs(np.mean(speed))


@pytest.mark.parametrize("init", ["disk:3", "disk:1.2"])
def test_descent_reaches_the_radial_optimum(init):
    cfg = MinimizeConfig(n=96, radius=4.0, init=init, max_outer_iter=80)
    report = minimize(cfg)
    rho, _ = radial_optimal_radius(1.0, 2.0)
    optimum = rasterize(Disk(rho), cfg.grid)
    assert hausdorff_distance(report.omega, optimum) <= 2.0 * cfg.grid.h, report.message
    totals = [row.total for row in report.trace]
    assert all(b < a for a, b in zip(totals, totals[1:]))
    assert not report.topology_changed


def test_report_of_a_stalled_run(grid, make_minimizer_report):
    run = make_minimizer_report(grid, converged=False)
    report = run.to_report()
    assert report.status == Status.FAILED
    assert report.metadata["message"] == "stalled"
    assert run.trace_rows()[0] == (0, 9.1, 12.8, 21.9, 0.3, 1.0)
    assert run.clearance == pytest.approx(1.0207)


def test_disconnected_domain_counts_two_loops(grid):
    x, y = grid.node_coords()
    phi = np.minimum(np.hypot(x + 1.5, y) - 0.5, np.hypot(x - 1.5, y) - 0.5)
    assert outer_loops(Region.from_phi(grid, phi)) == 2
