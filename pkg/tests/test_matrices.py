"""
Tests for symmetric matrices, inf-convolution and viscosity curvature.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fblab.errors import PreconditionError
from fblab.geomlab.matrices import (
    LocalGraph,
    SymMatrix,
    block_reduction_check,
    brute_force_inf_convolution,
    graph_mean_curvature,
    inf_convolution,
    inf_convolution_matrix,
    random_spd,
    trace_inequality_check,
    viscosity_mean_curvature,
)


def test_sym_matrix_symmetrizes():
    m = SymMatrix([[1.0, 2.0], [0.0, 3.0]])
    assert np.allclose(m.entries, [[1.0, 1.0], [1.0, 3.0]])
    assert m.dim == 2
    assert m.trace == 4.0


def test_sym_matrix_from_json():
    m = SymMatrix.from_json("[[2, 0], [0, 5]]")
    assert m.spd
    assert m.quadratic(np.array([1.0, 1.0])) == pytest.approx(7.0)


def test_sym_matrix_from_decoded_json():
    m = SymMatrix.from_json([[1, 0.5], [0.5, 1]])
    assert m.spd
    with pytest.raises(PreconditionError):
        SymMatrix.from_json("[[1, 2], [3]")
    with pytest.raises(PreconditionError):
        SymMatrix.from_json([[1, 2], [3]])


def test_sym_matrix_rejects_bad_input():
    with pytest.raises(PreconditionError):
        SymMatrix(np.ones((2, 3)))
    with pytest.raises(PreconditionError):
        SymMatrix([[np.inf]])


def test_graph_mean_curvature():
    assert graph_mean_curvature(SymMatrix.diag([0.5, 0.5])) == pytest.approx(2.0)


def test_scalar_inf_convolution():
    m = inf_convolution_matrix(SymMatrix([[2.0]]), SymMatrix([[2.0]]))
    assert m.entries[0, 0] == pytest.approx(2.0)
    assert brute_force_inf_convolution(SymMatrix([[2.0]]), SymMatrix([[2.0]]), np.array([1.0])) == pytest.approx(2.0)


def test_inf_convolution_requires_spd():
    with pytest.raises(PreconditionError):
        inf_convolution(SymMatrix.diag([1.0, -1.0]), SymMatrix.diag([1.0, 1.0]))
    with pytest.raises(PreconditionError):
        inf_convolution(SymMatrix.diag([1.0]), SymMatrix.diag([1.0, 1.0]))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), dim=st.integers(1, 4))
def test_trace_inequality_on_random_pairs(seed, dim):
    rng = np.random.default_rng(seed)
    B1, B2 = random_spd(rng, dim), random_spd(rng, dim)
    assert trace_inequality_check(B1, B2).passed
    result = inf_convolution(B1, B2)
    assert result.identity_error < 1e-8
    x = rng.standard_normal(dim)
    exact = float(result.matrix.quadratic(x))
    assert brute_force_inf_convolution(B1, B2, x) == pytest.approx(exact, rel=1e-6, abs=1e-9)


def test_trace_equality_for_equal_matrices():
    B = random_spd(np.random.default_rng(3), 3)
    report = trace_inequality_check(B, SymMatrix(B.entries))
    assert report.values["lhs"].value == pytest.approx(report.values["rhs"].value)


def test_viscosity_curvature_of_quadratic_graph():
    graph = LocalGraph.from_function(lambda x: x[:, 0] ** 2 + 2.0 * x[:, 1] ** 2, 2, 1.0)
    assert viscosity_mean_curvature(graph) == pytest.approx(6.0, rel=1e-6)


def test_viscosity_curvature_in_one_dimension():
    graph = LocalGraph.from_function(lambda x: 1.5 * x[:, 0] ** 2, 1, 0.5)
    assert viscosity_mean_curvature(graph) == pytest.approx(3.0)


def test_viscosity_curvature_rejects_negative_graphs():
    graph = LocalGraph.from_function(lambda x: x[:, 0] ** 2 - x[:, 1] ** 2, 2, 1.0)
    with pytest.raises(PreconditionError):
        viscosity_mean_curvature(graph)


def test_linear_graph_is_not_tangent():
    with pytest.raises(PreconditionError):
        LocalGraph.from_function(lambda x: x[:, 0], 2, 1.0)


def test_block_reduction_on_half_cylinder():
    graph = LocalGraph.from_function(lambda x: x[:, 1] ** 2, 2, 1.0)
    report = block_reduction_check(graph)
    assert report.passed
    assert report.values["full"].value == pytest.approx(2.0, rel=1e-3)


def test_block_reduction_needs_a_straight_segment():
    graph = LocalGraph.from_function(lambda x: x[:, 0] ** 2 + x[:, 1] ** 2, 2, 1.0)
    with pytest.raises(PreconditionError):
        block_reduction_check(graph)
