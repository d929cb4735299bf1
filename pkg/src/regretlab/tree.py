"""Single-player decision trees in which nature moves first.

Each state owns a rooted tree of decision nodes. Information sets group
decision nodes (possibly across states) that the decision maker cannot
tell apart. A plan picks one action per information set and induces an
act through the leaf utilities.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ._rational import as_fraction
from .beliefs import StateSpace
from .caps import Caps
from .regret import Act, Menu
from .report import CheckReport


@dataclass(frozen=True)
class Node:
    id: str
    state: str
    parent: str | None = None
    action: str | None = None
    utility: Fraction | None = None

    def __post_init__(self):
        if self.utility is not None:
            object.__setattr__(self, "utility", as_fraction(self.utility, what=f"utility of {self.id}"))

    @property
    def is_root(self) -> bool:
        return self.parent is None


@dataclass(frozen=True)
class History:
    """Nature's state followed by the decision maker's actions."""

    state: str
    actions: tuple[str, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "History":
        parts = [p for p in str(text).strip().strip("/").split("/")]
        if not parts or not parts[0]:
            raise ValueError(f"cannot parse history {text!r}; expected 'state/action/...'")
        return cls(parts[0], tuple(parts[1:]))

    def extend(self, action: str) -> "History":
        return History(self.state, self.actions + (action,))

    def prefixes(self) -> list["History"]:
        """Proper prefixes, shortest first (all within the same state)."""
        return [History(self.state, self.actions[:k]) for k in range(len(self.actions))]

    def is_prefix_of(self, other: "History") -> bool:
        return self.state == other.state and other.actions[: len(self.actions)] == self.actions

    def __str__(self) -> str:
        return "/".join((self.state,) + self.actions)

    def to_jsonable(self):
        return str(self)


@dataclass(frozen=True)
class Plan:
    """One action per information set, in the tree's information-set order."""

    actions: tuple[str, ...]
    isets: tuple[str, ...] = field(compare=False, repr=False, default=())

    def action_at(self, iset: str) -> str:
        return self.actions[self.isets.index(iset)]

    @property
    def label(self) -> str:
        return "-".join(self.actions)

    def as_dict(self) -> dict[str, str]:
        return dict(zip(self.isets, self.actions))

    def __str__(self) -> str:
        return self.label

    def to_jsonable(self):
        return self.as_dict()


class DecisionTree:
    """Per-state trees plus information sets.

    Structural problems (unknown parents, cycles, duplicate sibling actions,
    decision nodes without children) raise ``ValueError`` on construction.
    Information-set problems, including perfect-recall violations, are
    left to :func:`validate` so that they can be reported with witnesses.
    """

    def __init__(self, space: StateSpace, nodes: Iterable[Node], info_sets: Mapping[str, Sequence[str]] | Sequence[tuple[str, Sequence[str]]]):
        self.space = space
        self.nodes: dict[str, Node] = {}
        for n in nodes:
            if n.id in self.nodes:
                raise ValueError(f"duplicate node id {n.id!r}")
            if n.state not in space.states:
                raise ValueError(f"node {n.id!r} belongs to unknown state {n.state!r}")
            self.nodes[n.id] = n
        self.children: dict[str, list[str]] = {nid: [] for nid in self.nodes}
        self.roots: dict[str, str] = {}
        for n in self.nodes.values():
            if n.parent is None:
                if n.action is not None:
                    raise ValueError(f"root node {n.id!r} must not carry an action")
                if n.state in self.roots:
                    raise ValueError(f"state {n.state!r} has two roots")
                self.roots[n.state] = n.id
                continue
            parent = self.nodes.get(n.parent)
            if parent is None:
                raise ValueError(f"node {n.id!r} has unknown parent {n.parent!r}")
            if parent.state != n.state:
                raise ValueError(f"node {n.id!r} and its parent belong to different states")
            if not n.action:
                raise ValueError(f"node {n.id!r} needs an action label on its in-edge")
            if "/" in n.action:
                raise ValueError(f"action label {n.action!r} must not contain '/'")
            if parent.utility is not None:
                raise ValueError(f"leaf {parent.id!r} cannot have children")
            if any(self.nodes[c].action == n.action for c in self.children[parent.id]):
                raise ValueError(f"node {parent.id!r} has two children labelled {n.action!r}")
            self.children[parent.id].append(n.id)
        missing = [s for s in space.states if s not in self.roots]
        if missing:
            raise ValueError(f"states without a tree: {missing}")
        self.history_of: dict[str, History] = {}
        for s in space.states:
            stack = [(self.roots[s], History(s))]
            while stack:
                nid, h = stack.pop()
                if nid in self.history_of:
                    raise ValueError(f"cycle through node {nid!r}")
                self.history_of[nid] = h
                for c in self.children[nid]:
                    stack.append((c, h.extend(self.nodes[c].action)))
        if len(self.history_of) != len(self.nodes):
            raise ValueError("some nodes are not reachable from a root (cycle)")
        for n in self.nodes.values():
            if n.utility is None and not self.children[n.id]:
                raise ValueError(f"node {n.id!r} has neither children nor a utility")
        self.node_of: dict[History, str] = {h: nid for nid, h in self.history_of.items()}

        items = info_sets.items() if isinstance(info_sets, Mapping) else info_sets
        self.info_sets: dict[str, tuple[str, ...]] = {}
        for name, members in items:
            name = str(name)
            if name in self.info_sets:
                raise ValueError(f"duplicate information set name {name!r}")
            members = tuple(members)
            for nid in members:
                if nid not in self.nodes:
                    raise ValueError(f"information set {name!r} mentions unknown node {nid!r}")
            self.info_sets[name] = members
        self.iset_names: tuple[str, ...] = tuple(self.info_sets)
        self.iset_of: dict[str, str] = {}
        self._overlaps: list[tuple[str, str, str]] = []
        for name, members in self.info_sets.items():
            for nid in members:
                if nid in self.iset_of:
                    self._overlaps.append((nid, self.iset_of[nid], name))
                else:
                    self.iset_of[nid] = name

    # ------------------------------------------------------------------ construction helpers
    @classmethod
    def from_leaves(cls, space: StateSpace, leaves: Mapping[str | History, object],
                    info_sets: Mapping[str, Iterable[str | History]]) -> "DecisionTree":
        """Build a tree from leaf histories; node ids are the history strings."""
        nodes: dict[str, Node] = {}

        def ensure(h: History, utility=None):
            nid = str(h)
            if nid in nodes:
                if utility is not None:
                    raise ValueError(f"history {nid!r} given twice")
                return
            if h.actions:
                parent = History(h.state, h.actions[:-1])
                ensure(parent)
                nodes[nid] = Node(nid, h.state, str(parent), h.actions[-1], utility)
            else:
                nodes[nid] = Node(nid, h.state, None, None, utility)

        for key, u in leaves.items():
            h = key if isinstance(key, History) else History.parse(key)
            ensure(h, u)
        isets = {name: [str(h) for h in members] for name, members in info_sets.items()}
        return cls(space, nodes.values(), isets)

    # ------------------------------------------------------------------ basic queries
    @property
    def states(self) -> tuple[str, ...]:
        return self.space.states

    def is_leaf(self, nid: str) -> bool:
        return self.nodes[nid].utility is not None

    def resolve(self, h: History | str) -> str:
        h = History.parse(h) if isinstance(h, str) else h
        try:
            return self.node_of[h]
        except KeyError:
            raise KeyError(f"history {str(h)!r} is not in the tree") from None

    def history(self, h: History | str) -> History:
        h = History.parse(h) if isinstance(h, str) else h
        self.resolve(h)
        return h

    def actions_at(self, nid: str) -> tuple[str, ...]:
        return tuple(self.nodes[c].action for c in self.children[nid])

    def iset_actions(self, iset: str) -> tuple[str, ...]:
        return self.actions_at(self.info_sets[iset][0])

    def child(self, nid: str, action: str) -> str:
        for c in self.children[nid]:
            if self.nodes[c].action == action:
                return c
        raise KeyError(f"no action {action!r} at node {nid!r}")

    def histories(self, *, include_leaves: bool = True) -> list[History]:
        """All histories in deterministic order: by state, then depth-first in declaration order."""
        out = []
        for s in self.states:
            stack = [self.roots[s]]
            while stack:
                nid = stack.pop()
                if include_leaves or not self.is_leaf(nid):
                    out.append(self.history_of[nid])
                stack.extend(reversed(self.children[nid]))
        return out

    def iset_at(self, h: History | str) -> str | None:
        return self.iset_of.get(self.resolve(h))

    def possible_states(self, h: History | str) -> frozenset:
        """States the decision maker cannot rule out at ``h``.

        Terminal histories are not in any information set, so they reveal
        their own state.
        """
        nid = self.resolve(h)
        iset = self.iset_of.get(nid)
        if iset is None:
            return frozenset({self.nodes[nid].state})
        return frozenset(self.nodes[m].state for m in self.info_sets[iset])

    # ------------------------------------------------------------------ plans
    def plan_count(self) -> int:
        total = 1
        for name in self.iset_names:
            total *= len(self.iset_actions(name))
        return total

    def enumerate_plans(self, caps: Caps | None = None) -> list[Plan]:
        caps = caps or Caps.from_env()
        caps.require("plans", self.plan_count())
        choices = [self.iset_actions(name) for name in self.iset_names]
        return [Plan(tuple(combo), self.iset_names) for combo in itertools.product(*choices)]

    def make_plan(self, assignment: Mapping[str, str] | Sequence[str]) -> Plan:
        if isinstance(assignment, Mapping):
            unknown = set(assignment) - set(self.iset_names)
            if unknown:
                raise ValueError(f"unknown information sets {sorted(unknown)}")
            actions = tuple(assignment[name] for name in self.iset_names)
        else:
            actions = tuple(assignment)
            if len(actions) != len(self.iset_names):
                raise ValueError(f"plan needs {len(self.iset_names)} actions, got {len(actions)}")
        for name, a in zip(self.iset_names, actions):
            if a not in self.iset_actions(name):
                raise ValueError(f"action {a!r} is not available at information set {name!r}")
        return Plan(actions, self.iset_names)

    def is_feasible(self, plan: Plan, h: History | str) -> bool:
        h = self.history(h)
        nid = self.roots[h.state]
        for a in h.actions:
            iset = self.iset_of.get(nid)
            if iset is None or plan.action_at(iset) != a:
                return False
            nid = self.child(nid, a)
        return True

    def feasible_plans(self, h: History | str, plans: Sequence[Plan] | None = None) -> list[Plan]:
        plans = self.enumerate_plans() if plans is None else plans
        return [p for p in plans if self.is_feasible(p, h)]

    def plan_to_act(self, plan: Plan) -> Act:
        payoff = []
        for s in self.states:
            nid = self.roots[s]
            while not self.is_leaf(nid):
                iset = self.iset_of.get(nid)
                if iset is None:
                    raise ValueError(f"decision node {nid!r} is in no information set")
                nid = self.child(nid, plan.action_at(iset))
            payoff.append(self.nodes[nid].utility)
        return Act(tuple(payoff), plan.label)

    # ------------------------------------------------------------------ refinement and splicing
    @cached_property
    def refinement(self) -> dict[str, frozenset]:
        """Map each information set I to the sets J refining it (I itself included).

        J refines I when every node of J has an ancestor-or-self in I.
        """
        ancestors: dict[str, set[str]] = {}
        for nid in self.nodes:
            chain = set()
            cur = nid
            while cur is not None:
                chain.add(cur)
                cur = self.nodes[cur].parent
            ancestors[nid] = chain
        out = {}
        for name, members in self.info_sets.items():
            mem = set(members)
            out[name] = frozenset(j for j, jm in self.info_sets.items() if all(ancestors[n] & mem for n in jm))
        return out

    def refines(self, j: str, i: str) -> bool:
        return j in self.refinement[i]

    def splice(self, f: Plan, g: Plan, iset: str) -> Plan:
        """Follow ``f`` at ``iset`` and every set refining it, ``g`` elsewhere."""
        if iset not in self.info_sets:
            raise KeyError(f"unknown information set {iset!r}")
        ref = self.refinement[iset]
        return Plan(tuple(fa if name in ref else ga for name, fa, ga in zip(self.iset_names, f.actions, g.actions)), self.iset_names)

    # ------------------------------------------------------------------ misc
    def to_jsonable(self):
        return {"states": list(self.states), "nodes": len(self.nodes), "info_sets": {k: list(v) for k, v in self.info_sets.items()}}


def validate(t: DecisionTree) -> CheckReport:
    """Check information-set well-formedness and perfect recall."""
    witnesses: list[dict] = []
    for nid, first, second in t._overlaps:
        witnesses.append({"problem": "node in two information sets", "node": nid, "info_sets": [first, second]})
    for nid, n in t.nodes.items():
        if n.utility is None and nid not in t.iset_of:
            witnesses.append({"problem": "decision node in no information set", "node": nid, "history": t.history_of[nid]})
        if n.utility is not None and nid in t.iset_of:
            witnesses.append({"problem": "leaf in an information set", "node": nid, "info_set": t.iset_of[nid]})
    for name, members in t.info_sets.items():
        if not members:
            witnesses.append({"problem": "empty information set", "info_set": name})
            continue
        decision = [m for m in members if not t.is_leaf(m)]
        if not decision:
            continue
        ref = t.actions_at(decision[0])
        for m in decision[1:]:
            if t.actions_at(m) != ref:
                witnesses.append({"problem": "action sets differ within information set", "info_set": name,
                                  "nodes": [decision[0], m], "actions": [list(ref), list(t.actions_at(m))]})
                break
        rec = t.history_of[members[0]].actions
        for m in members[1:]:
            if t.history_of[m].actions != rec:
                witnesses.append({"problem": "perfect recall: action records differ", "info_set": name,
                                  "histories": [t.history_of[members[0]], t.history_of[m]]})
                break
    if not witnesses:
        for h in t.histories(include_leaves=False):
            e = t.possible_states(h)
            for c in t.children[t.resolve(h)]:
                if t.is_leaf(c):
                    continue
                h2 = t.history_of[c]
                e2 = t.possible_states(h2)
                if not e2 <= e:
                    witnesses.append({"problem": "perfect recall: possible states grow along a path",
                                      "histories": [h, h2], "possible_states": [sorted(e), sorted(e2)]})
    stats = {"nodes": len(t.nodes), "info_sets": len(t.info_sets), "states": len(t.states)}
    return CheckReport("validate", not witnesses, witnesses, stats)


class MenuPolicyKind(enum.Enum):
    CONSTANT = "constant-initial"
    FEASIBLE = "feasible-only"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class MenuPolicy:
    """How the evaluation menu is chosen at each history.

    ``explicit`` maps keys to act lists; a history is looked up by its path
    string, then by its information set name, then under ``"*"``.
    """

    kind: MenuPolicyKind
    explicit: Mapping[str, tuple[Act, ...]] = field(default_factory=dict)

    @classmethod
    def parse(cls, value, explicit: Mapping[str, Sequence[Act]] | None = None) -> "MenuPolicy":
        if isinstance(value, MenuPolicy):
            return value
        key = str(value).strip().lower()
        aliases = {"constant": MenuPolicyKind.CONSTANT, "constant-initial": MenuPolicyKind.CONSTANT,
                   "feasible": MenuPolicyKind.FEASIBLE, "feasible-only": MenuPolicyKind.FEASIBLE,
                   "explicit": MenuPolicyKind.EXPLICIT}
        if key not in aliases:
            raise ValueError(f"unknown menu policy {value!r}; use constant, feasible or explicit")
        kind = aliases[key]
        if kind is MenuPolicyKind.EXPLICIT and not explicit:
            raise ValueError("explicit menu policy needs menus")
        return cls(kind, {k: tuple(v) for k, v in (explicit or {}).items()})

    @classmethod
    def constant(cls) -> "MenuPolicy":
        return cls(MenuPolicyKind.CONSTANT)

    @classmethod
    def feasible(cls) -> "MenuPolicy":
        return cls(MenuPolicyKind.FEASIBLE)

    @property
    def name(self) -> str:
        return self.kind.value


def menu_at(t: DecisionTree, h: History | str, policy: MenuPolicy, plans: Sequence[Plan] | None = None) -> Menu:
    h = t.history(h)
    if policy.kind is MenuPolicyKind.EXPLICIT:
        for key in (str(h), t.iset_at(h), "*"):
            if key is not None and key in policy.explicit:
                return Menu(policy.explicit[key], t.states)
        raise KeyError(f"explicit menu policy has no menu for history {str(h)!r}")
    plans = t.enumerate_plans() if plans is None else plans
    if policy.kind is MenuPolicyKind.FEASIBLE:
        plans = [p for p in plans if t.is_feasible(p, h)]
    return Menu([t.plan_to_act(p) for p in plans], t.states)
