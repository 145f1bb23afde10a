import json

import pytest

from fblab.errors import PreconditionError
from fblab.reporting import Status
from fblab.verify.lab import CAPSULES, capsule_checks, load_matrix_pairs, matrix_pair_checks, matrix_trials


def test_matrix_trials_pass_and_are_reproducible():
    report = matrix_trials(trials=40, seed=3)
    assert report.check == "matrix_lab"
    assert [d.check for d in report.details] == [
        "trace_inequality", "harmonic_identity", "inf_convolution_brute_force", "trace_equality",
    ]
    assert report.passed, [(d.check, d.margin) for d in report.details]
    assert report.details[0].values["failures"].value == 0.0
    again = matrix_trials(trials=40, seed=3)
    assert [d.margin for d in again.details] == [d.margin for d in report.details]


def test_matrix_trials_tolerance_override_can_fail():
    report = matrix_trials(trials=10, seed=0, tolerances={"harmonic_identity": 0.0})
    identity = report.details[1]
    assert identity.tol == 0.0


def test_capsule_checks_cover_every_capsule():
    report = capsule_checks(samples=17)
    assert report.check == "capsule_lab"
    names = [d.check for d in report.details]
    assert names.count("inverse_curvature_concavity") == len(CAPSULES) + 1
    assert names.count("block_reduction") == len(CAPSULES)
    assert names.count("hull_curvature_semicontinuity") == len(CAPSULES)
    assert "cone_affinity" in names
    affinity = report.details[names.index("cone_affinity")]
    assert affinity.status == Status.PASSED
    for detail in report.details:
        if detail.check == "block_reduction":
            assert "analytic" in detail.values
            assert detail.metadata["capsule"] in CAPSULES


def test_matrix_pairs_from_json_are_checked():
    text = json.dumps([[[[2.0]], [[3.0]]], [[[2.0, 0.5], [0.5, 1.0]], [[4.0, 0.0], [0.0, 0.5]]]])
    pairs = load_matrix_pairs(text)
    assert [(b1.dim, b2.dim) for b1, b2 in pairs] == [(1, 1), (2, 2)]
    report = matrix_pair_checks(pairs)
    assert report.check == "matrix_input"
    assert report.passed, [(d.check, d.margin) for d in report.details]
    assert [d.check for d in report.details] == ["trace_inequality", "harmonic_identity"] * 2
    # equality in dimension one: 1 / (2 * 2 * 3 / 5) = 1/4 + 1/6
    assert report.details[0].values["lhs"].value == pytest.approx(5.0 / 12.0)
    assert report.details[2].metadata["B2"] == [[4.0, 0.0], [0.0, 0.5]]


@pytest.mark.parametrize("text", ["not json", "[]", "[[[[1.0]]]]", "[[[[1.0, 2.0]], [[1.0]]]]"])
def test_malformed_matrix_pairs_are_rejected(text):
    with pytest.raises(PreconditionError):
        load_matrix_pairs(text)


def test_matrix_pairs_of_mixed_dimension_are_rejected():
    pairs = load_matrix_pairs(json.dumps([[[[1.0]], [[1.0, 0.0], [0.0, 1.0]]]]))
    with pytest.raises(PreconditionError):
        matrix_pair_checks(pairs)
