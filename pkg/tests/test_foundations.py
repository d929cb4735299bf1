from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regretlab._rational import as_fraction
from regretlab.caps import CapExceeded, Caps
from regretlab.lp import dominated_by_hull, feasible_point
from regretlab.report import CheckReport, merge_reports

import oracle


class TestAsFraction:
    def test_accepts_exact_forms(self):
        assert as_fraction(3) == 3
        assert as_fraction("3/5") == F(3, 5)
        assert as_fraction(" -7 ") == -7
        assert as_fraction(F(1, 3)) == F(1, 3)

    def test_rejects_floats_and_decimals(self):
        with pytest.raises(TypeError):
            as_fraction(0.6)
        with pytest.raises(ValueError):
            as_fraction("0.6")
        with pytest.raises(TypeError):
            as_fraction(True)


class TestCaps:
    def test_env_parsing(self):
        caps = Caps.from_env({"REGRETLAB_CAPS": "plans=7, sigma=9"})
        assert (caps.plans, caps.sigma, caps.subsets) == (7, 9, 4096)

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            Caps.from_env({"REGRETLAB_CAPS": "nodes=3"})

    def test_require_names_size(self):
        with pytest.raises(CapExceeded) as info:
            Caps(plans=3).require("plans", 8)
        assert info.value.size == 8 and "plans" in str(info.value)


def test_feasible_point_simple():
    x = feasible_point([[1, 1]], [F(1)])
    assert x is not None and sum(x) == 1 and min(x) >= 0
    assert feasible_point([[1, 1]], [F(-1)]) is None


def test_hull_examples():
    # midpoint of two point masses
    assert dominated_by_hull((F(1, 2), F(1, 2)), [(1, 0), (0, 1)]) is not None
    # beyond the coordinatewise bound
    assert dominated_by_hull((F(0), F(3, 2)), [(1, 0), (0, 1)]) is None
    # outside the hull, inside the bounding box
    assert dominated_by_hull((F(3, 4), F(3, 4)), [(1, 0), (0, 1)]) is None
    assert dominated_by_hull((F(0), F(0)), []) is None


vec = st.lists(st.integers(0, 6), min_size=3, max_size=3)


@settings(max_examples=150, deadline=None)
@given(point=vec, gens=st.lists(vec, min_size=1, max_size=4))
def test_hull_agrees_with_scipy(point, gens):
    ours = dominated_by_hull(tuple(F(v) for v in point), [tuple(F(v) for v in g) for g in gens])
    assert (ours is not None) == oracle.hull_dominates(point, gens)
    if ours is not None:
        assert sum(ours) == 1 and min(ours) >= 0
        for s in range(3):
            assert sum(l * g[s] for l, g in zip(ours, gens)) >= point[s]


def test_report_requires_witness_on_failure():
    with pytest.raises(ValueError):
        CheckReport("x", False)


def test_merge_reports():
    a = CheckReport("x", True, stats={"cells": 2}, components={"a": True})
    b = CheckReport("x", False, [{"w": 1}], {"cells": 3}, {"a": False})
    m = merge_reports("x", [a, b])
    assert not m.passed and m.stats["cells"] == 5 and m.components == {"a": False}
    assert m.to_dict()["verdict"] == "fail"
