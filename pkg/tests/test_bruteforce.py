"""
Tests for the exhaustive family search.
"""

import numpy as np
import pytest

from fblab.errors import PreconditionError
from fblab.fbmin.bruteforce import ShapeFamily, parametric_bruteforce
from fblab.grid_core.grid import Grid
from fblab.grid_core.region import rasterize
from fblab.grid_core.shapes import Disk, Ellipse


@pytest.fixture(scope="module")
def K():
    return rasterize(Disk(1.0), Grid(64, 3.0))


@pytest.fixture(scope="module")
def family():
    return ShapeFamily("offset_disks", {"r": [1.1, 1.6, 2.0, 2.4, 3.2], "cx": [0.0]})


def test_family_validation():
    with pytest.raises(PreconditionError):
        ShapeFamily("triangles", {"a": [1.0]})
    with pytest.raises(PreconditionError):
        ShapeFamily("ellipses", {"a": [1.0]})


def test_from_ranges_includes_both_ends():
    family = ShapeFamily.from_ranges("ellipses", a=(1.0, 2.0, 0.5), b=(1.0, 1.0, 0.5))
    assert family.values["a"] == pytest.approx([1.0, 1.5, 2.0])
    members = list(family.members())
    assert len(members) == 3
    assert members[1] == ({"a": 1.5, "b": 1.0}, Ellipse(1.5, 1.0))


def test_best_disk_is_near_the_radial_optimum(K, family):
    result = parametric_bruteforce(K, 2.0, family)
    assert result.best.params == {"r": 2.0, "cx": 0.0}
    feasible = {entry.params["r"]: entry.feasible for entry in result.table}
    assert feasible == {1.1: False, 1.6: True, 2.0: True, 2.4: True, 3.2: False}
    assert "clearance" in result.table[0].reason


def test_table_order_is_independent_of_threads(K, family):
    serial = parametric_bruteforce(K, 2.0, family, threads=1)
    parallel = parametric_bruteforce(K, 2.0, family, threads=3)
    assert [e.params for e in serial.table] == [e.params for e in parallel.table]
    totals = [e.energy.total if e.energy else np.nan for e in serial.table]
    assert np.allclose(totals, [e.energy.total if e.energy else np.nan for e in parallel.table], equal_nan=True)


def test_rows_fill_infeasible_entries_with_nan(K, family):
    rows = list(parametric_bruteforce(K, 2.0, family).rows(["r", "cx"]))
    assert len(rows) == 5
    assert rows[0][0] == 1.1 and np.isnan(rows[0][2]) and rows[0][-1] is False
    assert rows[2][-1] is True


def test_no_feasible_member(K):
    family = ShapeFamily("offset_disks", {"r": [1.05], "cx": [0.0]})
    assert parametric_bruteforce(K, 2.0, family).best is None
