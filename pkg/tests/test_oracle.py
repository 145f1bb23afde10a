"""
Tests for the radial oracle.
"""

import math

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.fbmin.oracle import fb_identity_residual, radial_energy_sweep, radial_optimal_radius


def test_logarithmic_optimum():
    rho, energy = radial_optimal_radius(1.0, 2.0)
    assert rho == pytest.approx(2.0207, abs=1e-4)
    assert rho * math.log(rho) ** 2 == pytest.approx(1.0, rel=1e-10)
    assert energy == pytest.approx(2 * math.pi / math.log(rho) + 2 * math.pi * rho)


def test_three_dimensional_optimum():
    rho, _ = radial_optimal_radius(1.0, 2.0, n=3)
    assert rho * (rho - 1.0) ** 2 == pytest.approx(0.5, rel=1e-10)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_optimum_satisfies_identity_and_minimizes(p):
    rho, energy = radial_optimal_radius(1.0, p)
    assert abs(fb_identity_residual(1.0, rho, p, 2)) * rho < 1e-8
    sweep = radial_energy_sweep(1.0, p, 2, np.linspace(1.05, 3 * rho, 200))
    assert np.min(sweep[:, 1]) >= energy - 1e-9


def test_residual_sign_changes_once():
    assert fb_identity_residual(1.0, 1.2, 2.0, 2) > 0
    assert fb_identity_residual(1.0, 4.0, 2.0, 2) < 0


@pytest.mark.parametrize("a,p,n", [(0.0, 2.0, 2), (1.0, 1.0, 2), (1.0, 2.0, 1)])
def test_bad_arguments(a, p, n):
    with pytest.raises(PreconditionError):
        radial_optimal_radius(a, p, n)


def test_sweep_rejects_small_radii():
    with pytest.raises(PreconditionError):
        radial_energy_sweep(1.0, 2.0, 2, [0.5, 2.0])
