"""
Tests for the property suites.
"""

import json
import time
from unittest.mock import patch

import pytest
import yaml

from fblab.errors import ConfigError
from fblab.file_handler import FileHandler
from fblab.grid_core.grid import Grid
from fblab.plap.radial import radial_extension_terms
from fblab.plap.solver import PLapConfig
from fblab.reporting import Measured, Report, Status
from fblab.verify import suites
from fblab.verify.suites import (
    BUILTIN_SUITES,
    CHECKS,
    SuiteSpec,
    isolated,
    ordered_map,
    outer_inequality,
    run_suite,
    slug,
    verify_main_theorem,
)


def test_ordered_map_keeps_item_order():
    def slow_identity(k):
        time.sleep(0.01 * (5 - k))
        return k
    assert ordered_map(slow_identity, list(range(5)), threads=4) == [0, 1, 2, 3, 4]
    assert ordered_map(lambda k: 2 * k, [1, 2], threads=1) == [2, 4]


def test_isolated_turns_exceptions_into_failures():
    def boom():
        raise RuntimeError("boom")
    report = isolated("c", "anchor", boom)
    assert report.status == Status.FAILED
    assert report.error == "RuntimeError: boom"
    ok = Report.judge("c", "anchor", 0.0, 1.0)
    assert isolated("c", "anchor", lambda: ok) is ok


def test_slug():
    assert slug("disk:1") == "disk_1"
    assert slug("ellipse:1.5,1") == "ellipse_1.5_1"
    assert slug("union(square:1@-0.8,0;square:1@0.8,0)") == "union_square_1_0.8_0_square_1_0.8_0"


@pytest.mark.parametrize("data,key", [
    ({"checks": [{"check": "matrix_lab"}], "colour": 1}, "suite.colour"),
    ({"checks": [{"check": "matrix_lab"}], "grid": {"cells": 8}}, "grid.cells"),
    ({"checks": [{"check": "nonsense"}]}, "checks.0.check"),
    ({"checks": []}, "checks"),
    ({"checks": [{"check": "matrix_lab"}], "tolerances": {"nonsense": 1.0}}, "tolerances.nonsense"),
    ({"checks": [{"check": "matrix_lab"}], "threads": 0}, "threads"),
])
def test_suite_spec_errors_name_their_key(data, key):
    with pytest.raises(ConfigError) as info:
        SuiteSpec.from_dict(data)
    assert info.value.key == key


def test_suite_spec_from_dict_and_back():
    data = {
        "name": "mine",
        "grid": {"n": 64, "radius": 3},
        "seed": 4,
        "tolerances": {"fb_residual": 0.2},
        "descent": {"max_outer_iter": 10},
        "checks": [{"check": "main_theorem", "K": ["disk:1"], "p": [2.0]}],
    }
    spec = SuiteSpec.from_dict(data)
    assert spec.grid == Grid(64, 3.0)
    assert spec.checks[0].params == {"K": ["disk:1"], "p": [2.0]}
    assert SuiteSpec.from_dict(spec.to_dict()) == spec


def test_builtin_suites_resolve():
    for name in BUILTIN_SUITES:
        spec = SuiteSpec.resolve(name)
        assert spec.name == name
        assert all(check.check in CHECKS for check in spec.checks)


def test_resolve_reads_yaml(tmp_path):
    path = tmp_path / "suite.yaml"
    path.write_text(yaml.safe_dump({"name": "file", "checks": [{"check": "capsule_lab", "samples": 9}]}))
    spec = SuiteSpec.resolve(str(path))
    assert spec.name == "file" and spec.checks[0].params == {"samples": 9}
    with pytest.raises(ConfigError) as info:
        SuiteSpec.resolve(str(tmp_path / "absent.yaml"))
    assert info.value.key == "suite"


def test_run_suite_isolates_crashing_checks(tmp_path):
    def passing(spec, params, threads, artifacts):
        return Report.judge("matrix_lab", "", 0.0, 1.0, metadata=dict(params))

    def crashing(spec, params, threads, artifacts):
        raise RuntimeError("exploded")

    spec = SuiteSpec.from_dict({"name": "t", "checks": [
        {"check": "matrix_lab", "trials": 3}, {"check": "capsule_lab"},
    ]})
    handler = FileHandler(str(tmp_path))
    with patch.dict(CHECKS, {"matrix_lab": passing, "capsule_lab": crashing}):
        report = run_suite(spec, handler)
    assert report.check == "suite:t"
    assert report.status == Status.FAILED
    assert [d.status for d in report.details] == [Status.PASSED, Status.FAILED]
    assert report.details[0].metadata == {"trials": 3}
    assert report.details[1].error == "RuntimeError: exploded"
    written = json.loads((tmp_path / "01_capsule_lab" / "report.json").read_text())
    assert written["pass"] is False


def test_main_theorem_with_a_stubbed_descent(make_minimizer_report):
    grid = Grid(64, 3.0)
    fake = make_minimizer_report(grid)
    with patch.object(suites, "minimize", return_value=fake) as minimize:
        report = verify_main_theorem(["disk:1"], [2.0], grid)
    assert minimize.call_count == 3
    case = report.details[0]
    assert case.check == "main_theorem[disk:1, p=2.0]"
    by_check = {}
    for detail in case.details:
        by_check.setdefault(detail.check, []).append(detail)
    assert len(by_check["free_boundary_minimization"]) == 3
    assert len(by_check["convexity"]) == 3
    assert len(by_check["level_set_convexity"]) == 3
    assert by_check["uniqueness"][0].passed
    assert by_check["uniqueness"][0].values["max_hausdorff"].value == 0.0
    assert by_check["distance_from_K"][0].passed
    assert by_check["radial_oracle"][0].passed


def test_non_convex_K_skips_convexity(make_minimizer_report):
    grid = Grid(64, 3.0)
    fake = make_minimizer_report(grid)
    with patch.object(suites, "minimize", return_value=fake):
        report = verify_main_theorem(["lshape:2,2,1"], [2.0], grid)
    case = report.details[0]
    skipped, inclusion = case.details
    assert skipped.status == Status.SKIPPED
    assert skipped.metadata["skip_reason"] == "K is not convex"
    assert inclusion.check == "inclusion_and_bounded[lshape:2,2,1, p=2.0]"


def test_failing_case_does_not_stop_the_others(make_minimizer_report):
    grid = Grid(64, 3.0)
    with patch.object(suites, "minimize", return_value=make_minimizer_report(grid)):
        report = verify_main_theorem(["blob:1", "disk:1"], [2.0], grid)
    assert report.details[0].status == Status.FAILED
    assert "ShapeSpecError" in report.details[0].error
    assert len(report.details) == 2


def test_outer_inequality_is_skipped_on_the_square_box(make_minimizer_report):
    grid = Grid(64, 3.0)
    report = outer_inequality(make_minimizer_report(grid), {"p": 2.0})
    assert report.status == Status.SKIPPED
    assert report.metadata["skip_reason"] == "the free boundary does not reach the box"
    assert report.metadata["box_vertices"] == 0


def test_radial_extension_compares_the_flux_term():
    grid = Grid(64, 3.5)
    exact = radial_extension_terms(1.0, 2.0, 3.0, 2.0)
    values = {name: Measured(value, "energy") for name, value in exact.items()}
    values["C"] = Measured(1.1 * exact["C"], "energy")
    fake = Report.judge("extension_inequality", "anchor", 0.0, 1.0, values)
    with patch.object(suites, "extension_inequality_report", return_value=fake):
        report = suites._radial_extension(grid, 2.0, PLapConfig(p=2.0), (1.0, 2.0, 3.0), None)
    inequality, closed = report.details
    assert inequality.passed
    assert closed.status == Status.FAILED
    assert "C_exact" in closed.values
