"""Regret of acts against menus, and the set-valued choice functions built on it."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ._rational import as_fraction_tuple
from .beliefs import ProbMeasure, WeightedBeliefSet

_ZERO = Fraction(0)


class EmptyBeliefWarning(UserWarning):
    """MER was asked to maximize over an empty set of measures."""


@dataclass(frozen=True)
class Act:
    """A utility vector over the states. ``label`` is provenance only."""

    payoff: tuple[Fraction, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "payoff", as_fraction_tuple(self.payoff, what="payoff"))

    def __len__(self) -> int:
        return len(self.payoff)

    def __repr__(self) -> str:
        vals = ", ".join(str(v) for v in self.payoff)
        return f"Act({self.label or '?'}: {vals})"

    def to_jsonable(self):
        return {"label": self.label, "payoff": [str(v) for v in self.payoff]}


class Menu:
    """Nonempty set of acts, deduplicated by payoff vector.

    When several inputs share a payoff vector the first one is kept and the
    labels are joined with ``"|"`` for provenance.
    """

    def __init__(self, acts: Iterable[Act | Sequence], states: Sequence[str] | None = None):
        merged: dict[tuple, list] = {}
        for i, a in enumerate(acts):
            if not isinstance(a, Act):
                a = Act(a, label=f"a{i}")
            slot = merged.get(a.payoff)
            if slot is None:
                merged[a.payoff] = [a.payoff, [a.label] if a.label else []]
            elif a.label and a.label not in slot[1]:
                slot[1].append(a.label)
        if not merged:
            raise ValueError("a menu must contain at least one act")
        dims = {len(p) for p in merged}
        if len(dims) != 1:
            raise ValueError(f"acts have different dimensions {sorted(dims)}")
        self.dim = dims.pop()
        if states is not None and len(states) != self.dim:
            raise ValueError(f"acts have {self.dim} entries but there are {len(states)} states")
        self.states = tuple(states) if states is not None else None
        self.acts: tuple[Act, ...] = tuple(Act(p, "|".join(labels)) for p, labels in merged.values())

    def __iter__(self):
        return iter(self.acts)

    def __len__(self) -> int:
        return len(self.acts)

    def __contains__(self, act) -> bool:
        payoff = act.payoff if isinstance(act, Act) else as_fraction_tuple(act)
        return any(a.payoff == payoff for a in self.acts)

    def __eq__(self, other) -> bool:
        return isinstance(other, Menu) and set(self.payoffs) == set(other.payoffs)

    def __hash__(self) -> int:
        return hash(frozenset(self.payoffs))

    def __repr__(self) -> str:
        return f"Menu({list(self.acts)!r})"

    @property
    def payoffs(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(a.payoff for a in self.acts)

    @cached_property
    def best(self) -> tuple[Fraction, ...]:
        return tuple(max(a.payoff[s] for a in self.acts) for s in range(self.dim))

    def find(self, act: Act) -> Act:
        for a in self.acts:
            if a.payoff == act.payoff:
                return a
        raise KeyError(f"{act!r} is not in the menu")

    def union(self, others: Iterable[Act]) -> "Menu":
        return Menu(list(self.acts) + list(others), self.states)

    def subset(self, acts: Iterable[Act]) -> "Menu":
        return Menu([self.find(a) for a in acts], self.states)

    def to_jsonable(self):
        return [a.to_jsonable() for a in self.acts]


def _state_index(m: Menu, s) -> int:
    if isinstance(s, int):
        return s
    if m.states is None:
        raise ValueError("menu carries no state names; index states by position")
    return m.states.index(s)


def _check_dim(m: Menu, f: Act) -> None:
    if len(f.payoff) != m.dim:
        raise ValueError(f"act has {len(f.payoff)} entries, menu acts have {m.dim}")


def state_regret(m: Menu, f: Act, s) -> Fraction:
    """``best_m(s) - f(s)``. ``f`` need not belong to ``m``, so this can be negative."""
    _check_dim(m, f)
    i = _state_index(m, s)
    return m.best[i] - f.payoff[i]


def regret_vector(m: Menu, f: Act) -> tuple[Fraction, ...]:
    _check_dim(m, f)
    return tuple(b - v for b, v in zip(m.best, f.payoff))


def max_regret(m: Menu, f: Act, event: Iterable | None = None) -> Fraction:
    """Worst regret over the states in ``event`` (all states by default)."""
    reg = regret_vector(m, f)
    if event is None:
        return max(reg)
    idx = [_state_index(m, s) for s in event]
    if not idx:
        return _ZERO
    return max(reg[i] for i in idx)


def expected_regret(m: Menu, f: Act, pr: ProbMeasure) -> Fraction:
    reg = regret_vector(m, f)
    if len(pr.mass) != len(reg):
        raise ValueError("measure and act dimensions differ")
    return sum((p * r for p, r in zip(pr.mass, reg)), _ZERO)


def mer(m: Menu, f: Act, measures: Iterable[ProbMeasure]) -> Fraction:
    """Maximum expected regret. An empty measure set yields 0 and an :class:`EmptyBeliefWarning`."""
    measures = list(measures.measures if isinstance(measures, WeightedBeliefSet) else measures)
    if not measures:
        warnings.warn("MER over an empty set of measures is taken to be 0", EmptyBeliefWarning, stacklevel=2)
        return _ZERO
    return max(expected_regret(m, f, pr) for pr in measures)


def mwer(m: Menu, f: Act, bel: WeightedBeliefSet) -> Fraction:
    """Maximum weighted expected regret; 0 for the empty belief set."""
    if bel.is_empty:
        return _ZERO
    reg = regret_vector(m, f)
    return max(wm.weight * sum((p * r for p, r in zip(wm.measure.mass, reg)), _ZERO) for wm in bel.members)


class DecisionRule(enum.Enum):
    MINIMAX_REGRET = "minimax-regret"
    MER = "mer"
    MWER = "mwer"
    EXPECTED_REGRET = "expected-regret-single"

    @classmethod
    def parse(cls, value) -> "DecisionRule":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "minimax-regret": cls.MINIMAX_REGRET, "minimax": cls.MINIMAX_REGRET, "regret": cls.MINIMAX_REGRET,
            "mer": cls.MER, "mwer": cls.MWER,
            "expected-regret-single": cls.EXPECTED_REGRET, "expected-regret": cls.EXPECTED_REGRET, "expected": cls.EXPECTED_REGRET,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown decision rule {value!r}; choose from {[r.value for r in cls]}") from None

    @property
    def needs_beliefs(self) -> bool:
        return self is not DecisionRule.MINIMAX_REGRET


def rule_value(rule: DecisionRule | str, m: Menu, f: Act, beliefs: WeightedBeliefSet | None = None,
               event: Iterable | None = None) -> Fraction:
    """Value of ``f`` under ``rule`` against menu ``m`` (lower is better).

    For minimax regret, ``event`` restricts the worst case to the states
    still considered possible. The belief-based rules ignore ``event``: the
    caller is expected to pass beliefs already conditioned on it.
    """
    rule = DecisionRule.parse(rule)
    if rule is DecisionRule.MINIMAX_REGRET:
        return max_regret(m, f, event)
    if beliefs is None:
        raise ValueError(f"rule {rule.value} needs a belief set")
    if rule is DecisionRule.MWER:
        return mwer(m, f, beliefs)
    if rule is DecisionRule.MER:
        if beliefs.is_empty:
            return _ZERO
        return mer(m, f, beliefs.measures)
    # expected regret against a single measure
    if beliefs.is_empty:
        return _ZERO
    if len(beliefs) != 1:
        raise ValueError("expected-regret-single needs exactly one measure")
    return expected_regret(m, f, beliefs.measures[0])


def choice_values(rule, eval_menu: Menu, choice_set: Menu | Iterable[Act], beliefs: WeightedBeliefSet | None = None,
                  event: Iterable | None = None) -> list[tuple[Act, Fraction]]:
    acts = list(choice_set)
    return [(f, rule_value(rule, eval_menu, f, beliefs, event)) for f in acts]


def choice(rule, eval_menu: Menu, choice_set: Menu | Iterable[Act], beliefs: WeightedBeliefSet | None = None,
           event: Iterable | None = None) -> list[Act]:
    """Acts of ``choice_set`` minimizing the rule value computed against ``eval_menu``.

    Returns every minimizer, in the order of ``choice_set``. With an empty
    belief set every act scores 0, so the whole choice set is returned.
    """
    scored = choice_values(rule, eval_menu, choice_set, beliefs, event)
    if not scored:
        raise ValueError("choice set must be nonempty")
    low = min(v for _, v in scored)
    return [f for f, v in scored if v == low]


class RegretChoice(BaseEstimator):
    """Estimator-style wrapper around :func:`choice`.

    ``fit(X)`` takes the evaluation menu as an (acts x states) payoff matrix
    and records the per-state best. ``regret_values(X)`` scores the rows of
    another matrix (the choice set) and ``predict(X)`` flags its minimizers.
    Entries must be exact: ints, Fractions or ``"a/b"`` strings.
    """

    def __init__(self, rule: str = "mwer", beliefs: WeightedBeliefSet | None = None):
        self.rule = rule
        self.beliefs = beliefs

    @staticmethod
    def _acts(X) -> list[Act]:
        rows = X.tolist() if isinstance(X, np.ndarray) else list(X)
        return [Act(row, label=f"row{i}") for i, row in enumerate(rows)]

    def fit(self, X, y=None):
        self.rule_ = DecisionRule.parse(self.rule)
        if self.rule_.needs_beliefs and self.beliefs is None:
            raise ValueError(f"rule {self.rule_.value} needs beliefs")
        self.menu_ = Menu(self._acts(X))
        self.best_ = np.array(self.menu_.best, dtype=object)
        self.n_features_in_ = self.menu_.dim
        return self

    def transform(self, X) -> np.ndarray:
        """State-wise regret matrix of the rows of ``X`` (object array of Fractions)."""
        return np.array([regret_vector(self.menu_, f) for f in self._acts(X)], dtype=object)

    def regret_values(self, X) -> np.ndarray:
        acts = self._acts(X)
        return np.array([rule_value(self.rule_, self.menu_, f, self.beliefs) for f in acts], dtype=object)

    def predict(self, X) -> np.ndarray:
        vals = self.regret_values(X)
        low = min(vals)
        return np.array([v == low for v in vals], dtype=bool)
