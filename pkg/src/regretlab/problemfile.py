"""JSON problem files: parsing with exact rationals, and serialization back.

A minimal file::

    {
      "format": "regretlab/problem", "version": 1,
      "name": "coin",
      "states": ["h", "t"],
      "events": {"Heads": ["h"]},
      "tree": {"h": [{"id": "h"}, {"id": "h/x", "parent": "h", "action": "x", "utility": "1"}, ...],
               "t": [...]},
      "info_sets": {"root": ["h", "t"]},
      "beliefs": [{"weight": "1", "masses": {"h": "1/2", "t": "1/2"}}],
      "defaults": {"rule": "mwer", "update": "likelihood", "menu_policy": "constant"},
      "aliases": {"root": "h"}
    }

Numbers must be integers or strings such as ``"3/5"``; any float literal or
decimal string is rejected with the JSON path of the offending value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ._rational import as_fraction
from .beliefs import ProbMeasure, StateSpace, UpdateRule, WeightedBeliefSet
from .consistency import ChoiceContext
from .regret import Act, DecisionRule
from .tree import DecisionTree, History, MenuPolicy, Node

FORMAT = "regretlab/problem"
VERSION = 1


class ProblemError(ValueError):
    """The problem file is malformed; ``path`` locates the offending value."""

    def __init__(self, message: str, path: str = "$"):
        self.path = path
        super().__init__(f"{path}: {message}")


class _FloatLiteral(str):
    """Marker for a float token seen by the JSON parser."""


@dataclass
class Problem:
    name: str
    tree: DecisionTree
    beliefs: WeightedBeliefSet | None
    defaults: dict[str, str] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)
    menus: dict[str, list[Act]] = field(default_factory=dict)

    def history(self, text: str) -> History:
        return self.tree.history(self.aliases.get(text, text))

    def context(self, rule: str | None = None, update: str | None = None, menu: str | None = None) -> ChoiceContext:
        rule = DecisionRule.parse(rule or self.defaults.get("rule", "mwer"))
        upd = UpdateRule.parse(update or self.defaults.get("update", "likelihood"))
        policy = MenuPolicy.parse(menu or self.defaults.get("menu_policy", "constant"), self.menus)
        return ChoiceContext(rule, self.beliefs, upd, policy)


def _rational(value, path: str):
    if isinstance(value, _FloatLiteral):
        raise ProblemError(f"float literal {str(value)} is not allowed; write an exact rational such as \"3/5\"", path)
    try:
        return as_fraction(value, what=path)
    except (TypeError, ValueError) as exc:
        raise ProblemError(str(exc).split(": ", 1)[-1], path) from None


def _expect(obj, kind, path: str):
    if not isinstance(obj, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ProblemError(f"expected {name}, got {type(obj).__name__}", path)
    return obj


def _scan_floats(obj, path: str = "$") -> None:
    if isinstance(obj, _FloatLiteral):
        _rational(obj, path)
    elif isinstance(obj, dict):
        for k, v in obj.items():
            _scan_floats(v, f"{path}.{k}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            _scan_floats(v, f"{path}[{i}]")


def loads(text: str) -> Problem:
    try:
        data = json.loads(text, parse_float=_FloatLiteral)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    _scan_floats(data)
    return from_dict(data)


def load(path: str | Path) -> Problem:
    return loads(Path(path).read_text())


def _acts(raw, states, path: str) -> list[Act]:
    out = []
    for i, item in enumerate(_expect(raw, list, path)):
        p = f"{path}[{i}]"
        if isinstance(item, dict) and "payoff" in item:
            label, payoff = str(item.get("label", f"m{i}")), item["payoff"]
        else:
            label, payoff = f"m{i}", item
        if isinstance(payoff, dict):
            missing = set(states) - set(payoff)
            if missing:
                raise ProblemError(f"payoff misses states {sorted(missing)}", p)
            vec = [_rational(payoff[s], f"{p}.payoff.{s}") for s in states]
        else:
            payoff = _expect(payoff, list, p)
            if len(payoff) != len(states):
                raise ProblemError(f"payoff needs {len(states)} entries", p)
            vec = [_rational(v, f"{p}[{j}]") for j, v in enumerate(payoff)]
        out.append(Act(tuple(vec), label))
    return out


def from_dict(data: dict[str, Any]) -> Problem:
    _expect(data, dict, "$")
    fmt = data.get("format", FORMAT)
    if fmt != FORMAT:
        raise ProblemError(f"unknown format {fmt!r}", "$.format")
    if data.get("version", VERSION) != VERSION:
        raise ProblemError(f"unsupported version {data.get('version')!r}", "$.version")
    states = [str(s) for s in _expect(data.get("states"), list, "$.states")]
    events = _expect(data.get("events", {}), dict, "$.events")
    try:
        space = StateSpace(tuple(states), tuple((name, frozenset(_expect(ev, list, f"$.events.{name}"))) for name, ev in events.items()))
    except ValueError as exc:
        raise ProblemError(str(exc), "$.states") from None

    tree_raw = _expect(data.get("tree"), dict, "$.tree")
    nodes = []
    for s, node_list in tree_raw.items():
        for i, raw in enumerate(_expect(node_list, list, f"$.tree.{s}")):
            p = f"$.tree.{s}[{i}]"
            _expect(raw, dict, p)
            if "id" not in raw:
                raise ProblemError("node needs an id", p)
            utility = raw.get("utility")
            if utility is not None:
                utility = _rational(utility, f"{p}.utility")
            try:
                nodes.append(Node(str(raw["id"]), str(s), raw.get("parent"), raw.get("action"), utility))
            except ValueError as exc:
                raise ProblemError(str(exc), p) from None
    isets_raw = data.get("info_sets", {})
    if isinstance(isets_raw, list):
        isets = [(f"I{i}", members) for i, members in enumerate(isets_raw)]
    else:
        isets = list(_expect(isets_raw, dict, "$.info_sets").items())
    try:
        tree = DecisionTree(space, nodes, isets)
    except ValueError as exc:
        raise ProblemError(str(exc), "$.tree") from None

    beliefs = None
    if data.get("beliefs"):
        pairs = []
        for i, raw in enumerate(_expect(data["beliefs"], list, "$.beliefs")):
            p = f"$.beliefs[{i}]"
            _expect(raw, dict, p)
            weight_key = "weight" if "weight" in raw else "weights"
            weight = _rational(raw.get(weight_key, "1"), f"{p}.{weight_key}")
            masses = _expect(raw.get("masses"), dict, f"{p}.masses")
            values = {k: _rational(v, f"{p}.masses.{k}") for k, v in masses.items()}
            try:
                pr = ProbMeasure.from_mapping(states, values, bool(raw.get("defective", False)))
            except ValueError as exc:
                raise ProblemError(str(exc), f"{p}.masses") from None
            pairs.append((pr, weight))
        try:
            beliefs = WeightedBeliefSet.of(states, pairs)
        except ValueError as exc:
            raise ProblemError(str(exc), "$.beliefs") from None

    defaults = {str(k): str(v) for k, v in _expect(data.get("defaults", {}), dict, "$.defaults").items()}
    unknown = set(defaults) - {"rule", "update", "menu_policy"}
    if unknown:
        raise ProblemError(f"unknown defaults {sorted(unknown)}", "$.defaults")
    try:
        DecisionRule.parse(defaults.get("rule", "mwer"))
        UpdateRule.parse(defaults.get("update", "likelihood"))
    except ValueError as exc:
        raise ProblemError(str(exc), "$.defaults") from None
    aliases = {str(k): str(v) for k, v in _expect(data.get("aliases", {}), dict, "$.aliases").items()}
    for name, target in aliases.items():
        try:
            tree.history(target)
        except (KeyError, ValueError):
            raise ProblemError(f"alias points to unknown history {target!r}", f"$.aliases.{name}") from None
    menus = {str(k): _acts(v, states, f"$.menus.{k}") for k, v in _expect(data.get("menus", {}), dict, "$.menus").items()}
    return Problem(str(data.get("name", "")), tree, beliefs, defaults, aliases, menus)


def to_dict(problem: Problem) -> dict[str, Any]:
    t = problem.tree
    tree: dict[str, list] = {s: [] for s in t.states}
    for nid in sorted(t.nodes, key=lambda n: (t.states.index(t.nodes[n].state), len(t.history_of[n].actions), n)):
        n = t.nodes[nid]
        entry: dict[str, Any] = {"id": n.id}
        if n.parent is not None:
            entry["parent"] = n.parent
            entry["action"] = n.action
        if n.utility is not None:
            entry["utility"] = str(n.utility)
        tree[n.state].append(entry)
    out: dict[str, Any] = {
        "format": FORMAT,
        "version": VERSION,
        "name": problem.name,
        "states": list(t.states),
        "events": {name: t.space.sort_event(ev) for name, ev in t.space.event_basis},
        "tree": tree,
        "info_sets": {name: list(members) for name, members in t.info_sets.items()},
    }
    if problem.beliefs is not None:
        out["beliefs"] = []
        for wm in problem.beliefs.members:
            entry = {"weight": str(wm.weight), "masses": {s: str(m) for s, m in zip(t.states, wm.measure.mass) if m}}
            if wm.measure.defective:
                entry["defective"] = True
            out["beliefs"].append(entry)
    if problem.defaults:
        out["defaults"] = dict(problem.defaults)
    if problem.aliases:
        out["aliases"] = dict(problem.aliases)
    if problem.menus:
        out["menus"] = {k: [{"label": a.label, "payoff": [str(v) for v in a.payoff]} for a in acts]
                        for k, acts in problem.menus.items()}
    return out


def dumps(problem: Problem, indent: int = 2) -> str:
    return json.dumps(to_dict(problem), indent=indent)


def from_scenario(scenario, context: str | None = None) -> Problem:
    """Problem file content for a scenario; defaults come from one of its contexts."""
    name = context or next(iter(scenario.contexts))
    ctx = scenario.contexts[name]
    defaults = {"rule": ctx.rule.value, "update": ctx.update.value, "menu_policy": ctx.menu_policy.name}
    menus = {k: list(v) for k, v in ctx.menu_policy.explicit.items()}
    return Problem(scenario.name, scenario.tree, scenario.beliefs, defaults, dict(scenario.aliases), menus)
