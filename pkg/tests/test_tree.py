from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regretlab.beliefs import StateSpace
from regretlab.caps import CapExceeded, Caps
from regretlab.regret import Act
from regretlab.scenarios import GeneratorConfig, exam_table1, generate, procrastination
from regretlab.tree import DecisionTree, History, MenuPolicy, Node, menu_at, validate

import oracle


def two_day():
    return procrastination().tree


def exam_tree():
    return exam_table1().tree


def payoffs(menu):
    return sorted(a.payoff for a in menu)


class TestHistory:
    def test_parse_and_print(self):
        h = History.parse("hard/play/study")
        assert h.state == "hard" and h.actions == ("play", "study") and str(h) == "hard/play/study"

    def test_prefixes(self):
        h = History.parse("a/x/y")
        assert [str(p) for p in h.prefixes()] == ["a", "a/x"]
        assert History.parse("a/x").is_prefix_of(h) and not History.parse("b/x").is_prefix_of(h)


class TestConstruction:
    def test_two_roots(self):
        space = StateSpace(("s",))
        with pytest.raises(ValueError):
            DecisionTree(space, [Node("a", "s", None, None, 1), Node("b", "s", None, None, 2)], {})

    def test_unknown_parent(self):
        space = StateSpace(("s",))
        with pytest.raises(ValueError):
            DecisionTree(space, [Node("a", "s"), Node("b", "s", "zz", "x", 1)], {"i": ["a"]})

    def test_duplicate_sibling_actions(self):
        space = StateSpace(("s",))
        nodes = [Node("r", "s"), Node("a", "s", "r", "x", 1), Node("b", "s", "r", "x", 2)]
        with pytest.raises(ValueError):
            DecisionTree(space, nodes, {"i": ["r"]})

    def test_missing_state_tree(self):
        with pytest.raises(ValueError):
            DecisionTree.from_leaves(StateSpace(("s", "t")), {"s/x": 1}, {"i": ["s"]})


class TestValidate:
    def test_two_day_study_passes(self):
        assert validate(two_day()).passed
        assert validate(exam_tree()).passed

    def test_mixed_action_sets(self):
        space = StateSpace(("s", "t"))
        t = DecisionTree.from_leaves(space, {"s/a": 1, "s/b": 2, "t/a": 3, "t/c": 4}, {"root": ["s", "t"]})
        report = validate(t)
        assert not report.passed
        assert report.witnesses[0]["info_set"] == "root"
        assert "action sets differ" in report.witnesses[0]["problem"]

    def test_possible_states_grow(self):
        # states separated at the root, merged one move later
        space = StateSpace(("s", "t"))
        leaves = {"s/a/x": 1, "s/a/y": 2, "t/a/x": 3, "t/a/y": 4}
        t = DecisionTree.from_leaves(space, leaves, {"rs": ["s"], "rt": ["t"], "later": ["s/a", "t/a"]})
        report = validate(t)
        assert not report.passed
        w = report.witnesses[0]
        assert "grow" in w["problem"]
        assert [str(h) for h in w["histories"]] == ["s", "s/a"]

    def test_overlapping_info_sets(self):
        space = StateSpace(("s",))
        t = DecisionTree.from_leaves(space, {"s/a": 1, "s/b": 2}, {"one": ["s"], "two": ["s"]})
        report = validate(t)
        assert not report.passed and report.witnesses[0]["info_sets"] == ["one", "two"]

    def test_uncovered_decision_node(self):
        t = DecisionTree.from_leaves(StateSpace(("s",)), {"s/a": 1, "s/b": 2}, {})
        assert not validate(t).passed

    def test_leaf_in_info_set(self):
        t = DecisionTree.from_leaves(StateSpace(("s",)), {"s/a": 1, "s/b": 2}, {"r": ["s"], "leaf": ["s/a"]})
        assert any("leaf" in w["problem"] for w in validate(t).witnesses)


class TestPossibleStates:
    def test_root_is_everything(self):
        t = two_day()
        assert t.possible_states("hard") == frozenset(t.states)

    def test_exam_hard(self):
        assert exam_tree().possible_states("hard-long/play") == {"hard-short", "hard-long"}

    def test_terminal_reveals_state(self):
        assert exam_tree().possible_states("easy-long/play/study") == {"easy-long"}


class TestPlans:
    def test_counts(self):
        assert two_day().plan_count() == 4 and len(two_day().enumerate_plans()) == 4
        assert len(exam_tree().enumerate_plans()) == 8

    def test_single_info_set(self):
        leaves = {f"s/a{i}": i for i in range(5)}
        t = DecisionTree.from_leaves(StateSpace(("s",)), leaves, {"only": ["s"]})
        assert len(t.enumerate_plans()) == 5

    def test_cap(self):
        with pytest.raises(CapExceeded):
            exam_tree().enumerate_plans(Caps(plans=7))

    def test_feasible_after_play(self):
        t = two_day()
        assert len(t.feasible_plans("hard")) == 4
        assert sorted(p.label for p in t.feasible_plans("easy/play")) == ["play-play", "play-study"]
        assert [p.label for p in t.feasible_plans("easy/play/study")] == ["play-study"]

    def test_plan_to_act(self):
        t = two_day()
        assert t.plan_to_act(t.make_plan(["play", "study"])).payoff == (10, 10)
        assert t.plan_to_act(t.make_plan(["study", "play"])).payoff == (25, 0)
        assert t.plan_to_act(t.make_plan(["study", "study"])).payoff == (25, 0)
        assert t.plan_to_act(t.make_plan({"day1": "play", "day2": "play"})).payoff == (5, 20)

    def test_make_plan_rejects_bad_actions(self):
        with pytest.raises(ValueError):
            two_day().make_plan(["play", "sleep"])
        with pytest.raises(ValueError):
            two_day().make_plan(["play"])


class TestMenus:
    def test_feasible_day2(self):
        t = two_day()
        assert payoffs(menu_at(t, "hard/play", MenuPolicy.feasible())) == [(5, 20), (10, 10)]

    def test_constant_day2(self):
        t = two_day()
        assert payoffs(menu_at(t, "hard/play", MenuPolicy.constant())) == [(5, 20), (10, 10), (25, 0)]

    def test_root_same_under_both(self):
        t = two_day()
        assert menu_at(t, "easy", MenuPolicy.feasible()) == menu_at(t, "easy", MenuPolicy.constant())

    def test_explicit_lookup_order(self):
        t = two_day()
        policy = MenuPolicy.parse("explicit", {"hard/play": [Act((1, 1))], "day2": [Act((2, 2))], "*": [Act((3, 3))]})
        assert payoffs(menu_at(t, "hard/play", policy)) == [(1, 1)]
        assert payoffs(menu_at(t, "easy/play", policy)) == [(2, 2)]
        assert payoffs(menu_at(t, "easy", policy)) == [(3, 3)]

    def test_explicit_needs_menus(self):
        with pytest.raises(ValueError):
            MenuPolicy.parse("explicit")
        with pytest.raises(ValueError):
            MenuPolicy.parse("sometimes")


class TestSplice:
    def test_exam_hard(self):
        t = exam_tree()
        f = t.make_plan(["play", "study", "study"])
        g = t.make_plan(["play", "play", "play"])
        assert t.splice(f, g, "hard").actions == ("play", "study", "play")

    def test_same_plan_and_root(self):
        t = exam_tree()
        plans = t.enumerate_plans()
        for f, g in itertools.product(plans, plans):
            assert t.splice(f, f, "hard") == f
            assert t.splice(f, g, "day1") == f

    def test_refinement(self):
        t = exam_tree()
        assert t.refinement["hard"] == {"hard"}
        assert t.refinement["day1"] == {"day1", "hard", "easy"}

    def test_unknown_set(self):
        t = exam_tree()
        p = t.enumerate_plans()[0]
        with pytest.raises(KeyError):
            t.splice(p, p, "nowhere")


GEN = GeneratorConfig(seed=0, n_states=(2, 3), depth=(1, 3), branching=(2, 3), n_measures=(1, 2), max_plans=64)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_generated_tree_invariants(seed):
    sc = generate(GeneratorConfig(**{**GEN.__dict__, "seed": seed}))
    t = sc.tree
    assert validate(t).passed
    plans = t.enumerate_plans()
    # plans are exactly the product of per-set action lists
    assert sorted(p.actions for p in plans) == sorted(oracle.plans_of([t.iset_actions(n) for n in t.iset_names]))
    const = menu_at(t, t.histories()[0], MenuPolicy.constant(), plans)
    for h in t.histories():
        fe = {p.actions for p in t.feasible_plans(h, plans)}
        for pre in h.prefixes():
            # feasibility shrinks along a path
            assert fe <= {p.actions for p in t.feasible_plans(pre, plans)}
        assert fe
        assert menu_at(t, h, MenuPolicy.constant(), plans) == const
    for f, g in itertools.islice(itertools.product(plans, plans), 40):
        for name in t.iset_names:
            s = t.splice(f, g, name)
            for j, a in zip(t.iset_names, s.actions):
                assert a == (f.action_at(j) if t.refines(j, name) else g.action_at(j))
