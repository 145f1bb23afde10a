"""
Tests for the two-ball capsule.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.geomlab.capsule import (
    Capsule,
    affinity_error,
    capsule_ruling_profile,
    capsule_tangency_graph,
    hull_inverse_curvature_concavity_check,
    upper_semicontinuity_check,
)
from fblab.geomlab.matrices import viscosity_mean_curvature


def test_tangency_points_lie_on_both_balls():
    capsule = Capsule(1.0, 2.0, 4.0)
    t1, t2 = capsule.tangency
    assert np.linalg.norm(t1) == pytest.approx(1.0)
    assert np.linalg.norm(t2 - np.array([4.0, 0.0])) == pytest.approx(2.0)
    assert np.dot(t2 - t1, capsule.normal) == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(t2 - t1) == pytest.approx(capsule.ruling_length)


def test_nested_balls_are_rejected():
    with pytest.raises(PreconditionError):
        Capsule(1.0, 3.0, 1.0)
    with pytest.raises(PreconditionError):
        Capsule(0.0, 1.0, 2.0)


def test_signed_distance_2d():
    capsule = Capsule(1.0, 1.0, 2.0)
    q = np.array([[-2.0, 0.0], [1.0, 0.5], [4.0, 0.0], [1.0, 3.0]])
    assert np.allclose(capsule.signed_distance_2d(q), [1.0, -0.5, 1.0, 2.0])


def test_cylinder_profile_is_constant():
    profile = capsule_ruling_profile(1.0, 1.0, 2.0, 9)
    assert np.allclose(profile[:, 1], 1.0)
    assert profile[-1, 0] == pytest.approx(2.0)


def test_cone_inverse_curvature_is_affine():
    profile = capsule_ruling_profile(1.0, 2.0, 4.0, 33)
    assert affinity_error(profile) < 1e-12
    report = hull_inverse_curvature_concavity_check(profile)
    assert report.passed
    assert report.metadata["branch"] == "concave"


def test_planar_capsule_takes_the_degenerate_branch():
    report = hull_inverse_curvature_concavity_check(capsule_ruling_profile(1.0, 1.0, 3.0, 9, dim=2))
    assert report.passed
    assert report.metadata["branch"] == "degenerate"


def test_convex_inverse_curvature_fails():
    s = np.linspace(0.0, 1.0, 9)
    report = hull_inverse_curvature_concavity_check(np.stack([s, 1.0 / (1.0 + s ** 2)], axis=1))
    assert not report.passed
    assert report.margin < 0


def test_profile_validation():
    with pytest.raises(PreconditionError):
        capsule_ruling_profile(1.0, 1.0, 2.0, 1)
    with pytest.raises(PreconditionError):
        hull_inverse_curvature_concavity_check(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(PreconditionError):
        hull_inverse_curvature_concavity_check(np.array([[0.0, -1.0], [1.0, -1.0]]))


def test_tangency_graph_on_cylinder():
    capsule = Capsule(1.0, 1.0, 2.0)
    graph = capsule_tangency_graph(capsule, 1.0, 0.05, samples=8)
    # straight along the ruling, a unit circle across it
    assert viscosity_mean_curvature(graph) == pytest.approx(1.0, rel=1e-2)


def test_upper_semicontinuity_at_cylinder_junction():
    report = upper_semicontinuity_check(Capsule(1.0, 1.0, 2.0))
    assert report.passed
    assert report.values["limsup_along_ruling"].value == pytest.approx(1.0)
