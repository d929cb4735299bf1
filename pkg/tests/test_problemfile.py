from __future__ import annotations

import json
from fractions import Fraction as F
from pathlib import Path

import pytest

from regretlab import problemfile
from regretlab.problemfile import ProblemError
from regretlab.scenarios import BUILTINS, builtin
from regretlab.tree import validate

DATA = Path(__file__).parent / "data"


def singleton_text():
    return (DATA / "singleton.json").read_text()


def semantic(problem):
    t = problem.tree
    nodes = sorted((str(t.history_of[n]), t.nodes[n].utility) for n in t.nodes)
    bel = None if problem.beliefs is None else sorted((wm.measure.mass, wm.weight, wm.measure.defective) for wm in problem.beliefs)
    isets = {k: sorted(str(t.history_of[n]) for n in v) for k, v in t.info_sets.items()}
    menus = {k: [a.payoff for a in v] for k, v in problem.menus.items()}
    return nodes, bel, isets, problem.defaults, problem.aliases, menus, dict(t.space.event_basis)


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_round_trip_builtins(name):
    sc = builtin(name)
    for ctx in sc.contexts:
        problem = problemfile.from_scenario(sc, ctx)
        again = problemfile.loads(problemfile.dumps(problem))
        assert semantic(again) == semantic(problem)
        assert problemfile.dumps(again) == problemfile.dumps(problem)


def test_round_trip_fixture_files():
    for path in DATA.glob("*.json"):
        problem = problemfile.load(path)
        assert semantic(problemfile.loads(problemfile.dumps(problem))) == semantic(problem)


def test_singleton_file_contents():
    p = problemfile.loads(singleton_text())
    assert validate(p.tree).passed
    assert [(wm.measure.mass, wm.weight) for wm in p.beliefs] == [((F(1, 3), F(2, 3)), 1)]
    assert str(p.history("root")) == "rain"
    ctx = p.context()
    assert (ctx.rule.value, ctx.update.value, ctx.menu_policy.name) == ("mwer", "likelihood", "constant-initial")
    assert p.context(update="prior").update.value == "prior-by-prior"


def test_list_form_info_sets():
    p = problemfile.load(DATA / "trivial_info.json")
    assert p.tree.iset_names == ("I0", "I1")


def test_defective_flag_round_trips():
    p = problemfile.from_scenario(builtin("exam-table1"))
    d = problemfile.to_dict(p)
    assert [b.get("defective", False) for b in d["beliefs"]] == [False, True]
    assert d["beliefs"][1]["weight"] == "3/5"


def edit(mutator):
    data = json.loads(singleton_text())
    mutator(data)
    return json.dumps(data)


@pytest.mark.parametrize("text, path", [
    (singleton_text().replace('"1/3"', '0.3333'), "$.beliefs[0].masses.rain"),
    (singleton_text().replace('"weights": "1"', '"weights": 1.0'), "$.beliefs[0].weights"),
    (singleton_text().replace('"1/3"', '"0.6"'), "$.beliefs[0].masses.rain"),
    (singleton_text().replace('"utility": "2"', '"utility": "two"'), "$.tree.rain[3].utility"),
])
def test_rejects_inexact_numbers_with_path(text, path):
    with pytest.raises(ProblemError) as info:
        problemfile.loads(text)
    assert info.value.path == path
    assert path in str(info.value)


@pytest.mark.parametrize("mutator, path", [
    (lambda d: d.update(format="other"), "$.format"),
    (lambda d: d.update(version=9), "$.version"),
    (lambda d: d["beliefs"][0]["masses"].update(dry="1/3"), "$.beliefs[0].masses"),
    (lambda d: d["defaults"].update(rule="maxmin"), "$.defaults"),
    (lambda d: d["defaults"].update(colour="red"), "$.defaults"),
    (lambda d: d["aliases"].update(root="rain/fly"), "$.aliases.root"),
    (lambda d: d["tree"]["rain"][1].pop("id"), "$.tree.rain[1]"),
    (lambda d: d["tree"]["rain"].append({"id": "x", "parent": "nowhere", "action": "a", "utility": "1"}), "$.tree"),
    (lambda d: d.update(states="rain"), "$.states"),
])
def test_structural_errors_carry_paths(mutator, path):
    with pytest.raises(ProblemError) as info:
        problemfile.loads(edit(mutator))
    assert info.value.path == path


def test_invalid_json():
    with pytest.raises(ProblemError) as info:
        problemfile.loads("{")
    assert "line 1" in str(info.value)
