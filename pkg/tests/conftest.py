"""
Shared fixtures.
"""

import numpy as np
import pytest

from fblab.fbmin.descent import MinimizerReport, TraceRow
from fblab.fbmin.energy import EnergyTerms, FreeBoundaryResidual
from fblab.grid_core.grid import Grid, ScalarField
from fblab.grid_core.region import rasterize
from fblab.grid_core.shapes import Disk
from fblab.plap.radial import radial_potential


@pytest.fixture
def grid():
    return Grid(64, 3.0)


def radial_field(grid: Grid, a: float, rho: float, p: float = 2.0) -> ScalarField:
    """Exact annulus potential, extended by 1 inside and 0 outside."""
    def func(x, y):
        r = np.clip(np.hypot(x, y), a, rho)
        return radial_potential(a, rho, p, 2, r)
    return ScalarField.from_function(grid, func)


def fake_minimizer_report(grid: Grid, radius: float = 2.0207, converged: bool = True) -> MinimizerReport:
    """A descent result around the unit disk without running the descent."""
    count = 8
    theta = np.linspace(0.0, 2.0 * np.pi, count, endpoint=False)
    points = radius * np.stack([np.cos(theta), np.sin(theta)], axis=1)
    kappa = np.full(count, 1.0 / radius)
    residual = FreeBoundaryResidual(
        points=points,
        normals=points / radius,
        loop=np.zeros(count, dtype=int),
        gradient_term=kappa,
        curvature=kappa,
        residual=np.zeros(count),
        on_box=np.zeros(count, dtype=bool),
    )
    return MinimizerReport(
        omega=rasterize(Disk(radius), grid),
        potential=radial_field(grid, 1.0, radius),
        energy=EnergyTerms(9.0, 12.7, 21.7),
        residual=residual,
        trace=[TraceRow(0, 9.1, 12.8, 21.9, 0.3, 1.0), TraceRow(1, 9.0, 12.7, 21.7, 0.01, 0.0)],
        converged=converged,
        message="free boundary residual and energy change below tolerance" if converged else "stalled",
        config={"tol_fb_residual": 0.1, "clearance": radius - 1.0, "h": grid.h},
    )


@pytest.fixture
def minimizer_report(grid):
    return fake_minimizer_report(grid)


@pytest.fixture
def make_minimizer_report():
    return fake_minimizer_report
