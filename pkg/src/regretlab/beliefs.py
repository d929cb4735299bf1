"""Weighted sets of probability measures over a finite state space.

Everything is exact: masses and weights are :class:`~fractions.Fraction`
values, events are ``frozenset`` objects of state identifiers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ._rational import as_fraction, as_fraction_tuple
from .caps import Caps
from .lp import dominated_by_hull

Event = frozenset

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class StateSpace:
    """Ordered finite state space plus the named events declared relevant."""

    states: tuple[str, ...]
    event_basis: tuple[tuple[str, frozenset], ...] = ()

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        if not states:
            raise ValueError("a state space needs at least one state")
        if len(set(states)) != len(states):
            raise ValueError(f"duplicate state identifiers in {states}")
        object.__setattr__(self, "states", states)
        basis = []
        items = self.event_basis.items() if isinstance(self.event_basis, Mapping) else self.event_basis
        for name, ev in items:
            ev = frozenset(ev)
            unknown = ev - set(states)
            if unknown:
                raise ValueError(f"event {name!r} mentions unknown states {sorted(unknown)}")
            basis.append((str(name), ev))
        object.__setattr__(self, "event_basis", tuple(basis))

    def __len__(self) -> int:
        return len(self.states)

    @property
    def full(self) -> frozenset:
        return frozenset(self.states)

    def index(self, state: str) -> int:
        return self.states.index(state)

    def event(self, states: Iterable[str]) -> frozenset:
        ev = frozenset(states)
        unknown = ev - self.full
        if unknown:
            raise ValueError(f"unknown states {sorted(unknown)}")
        return ev

    def named(self, name: str) -> frozenset:
        for n, ev in self.event_basis:
            if n == name:
                return ev
        raise KeyError(f"no event named {name!r}")

    def complement(self, ev: Iterable[str]) -> frozenset:
        return self.full - frozenset(ev)

    def sort_event(self, ev: Iterable[str]) -> list[str]:
        return sorted(ev, key=self.states.index)

    def with_basis(self, extra: Iterable[tuple[str, Iterable[str]]]) -> "StateSpace":
        return StateSpace(self.states, tuple(self.event_basis) + tuple((n, frozenset(e)) for n, e in extra))


@dataclass(frozen=True)
class ProbMeasure:
    """A probability mass function on an ordered state space.

    ``defective=True`` admits total mass below one. It exists for fixtures
    that print unnormalized rows; conditioning such a row on an event of
    positive mass yields an ordinary probability measure.
    """

    states: tuple[str, ...]
    mass: tuple[Fraction, ...]
    defective: bool = False

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        mass = as_fraction_tuple(self.mass, what="mass")
        object.__setattr__(self, "mass", mass)
        if len(mass) != len(self.states):
            raise ValueError(f"mass vector has {len(mass)} entries for {len(self.states)} states")
        if any(m < 0 for m in mass):
            raise ValueError("masses must be nonnegative")
        total = sum(mass, _ZERO)
        if self.defective:
            if not 0 < total <= 1:
                raise ValueError(f"defective measure must have total mass in (0, 1], got {total}")
        elif total != 1:
            raise ValueError(f"masses must sum to exactly 1, got {total}")

    @classmethod
    def from_mapping(cls, states: Sequence[str], masses: Mapping[str, object], defective: bool = False) -> "ProbMeasure":
        unknown = set(masses) - set(states)
        if unknown:
            raise ValueError(f"masses for unknown states {sorted(unknown)}")
        return cls(tuple(states), tuple(as_fraction(masses.get(s, 0), what=f"mass[{s}]") for s in states), defective)

    @classmethod
    def point(cls, states: Sequence[str], state: str) -> "ProbMeasure":
        return cls(tuple(states), tuple(_ONE if s == state else _ZERO for s in states))

    @classmethod
    def uniform(cls, states: Sequence[str], support: Iterable[str] | None = None) -> "ProbMeasure":
        support = set(states if support is None else support)
        p = Fraction(1, len(support))
        return cls(tuple(states), tuple(p if s in support else _ZERO for s in states))

    def __getitem__(self, state: str) -> Fraction:
        return self.mass[self.states.index(state)]

    @property
    def total(self) -> Fraction:
        return sum(self.mass, _ZERO)

    def prob(self, event: Iterable[str]) -> Fraction:
        ev = set(event)
        return sum((m for s, m in zip(self.states, self.mass) if s in ev), _ZERO)

    def condition(self, event: Iterable[str]) -> "ProbMeasure":
        ev = set(event)
        pe = self.prob(ev)
        if pe == 0:
            raise ZeroDivisionError("conditioning on an event of probability zero")
        return ProbMeasure(self.states, tuple(m / pe if s in ev else _ZERO for s, m in zip(self.states, self.mass)))

    def expectation(self, values: Sequence[Fraction]) -> Fraction:
        return sum((m * v for m, v in zip(self.mass, values)), _ZERO)

    def to_jsonable(self):
        return {s: str(m) for s, m in zip(self.states, self.mass)}


@dataclass(frozen=True)
class WeightedMeasure:
    measure: ProbMeasure
    weight: Fraction

    def __post_init__(self):
        w = as_fraction(self.weight, what="weight")
        if not 0 <= w <= 1:
            raise ValueError(f"weight must lie in [0, 1], got {w}")
        object.__setattr__(self, "weight", w)

    @property
    def subprobability(self) -> tuple[Fraction, ...]:
        return tuple(self.weight * m for m in self.measure.mass)


@dataclass(frozen=True)
class WeightedBeliefSet:
    """Finite set of (measure, weight) pairs.

    By default some member must carry weight exactly 1. Pass
    ``require_normalized=False`` for intermediate results such as
    prior-by-prior updates, which keep the original weights, or for the
    empty set produced by updating on a null event.
    """

    states: tuple[str, ...]
    members: tuple[WeightedMeasure, ...]
    require_normalized: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        members = tuple(self.members)
        object.__setattr__(self, "members", members)
        seen = set()
        for wm in members:
            if wm.measure.states != self.states:
                raise ValueError("member measure is defined on a different state space")
            if wm.measure.mass in seen:
                raise ValueError("two members share an identical mass vector")
            seen.add(wm.measure.mass)
        if self.require_normalized:
            if not members:
                raise ValueError("empty belief set requires require_normalized=False")
            if not any(wm.weight == 1 for wm in members):
                raise ValueError("weights are not normalized: no member has weight 1")

    @classmethod
    def of(cls, states: Sequence[str], pairs: Iterable[tuple[ProbMeasure, object]], *, require_normalized: bool = True) -> "WeightedBeliefSet":
        return cls(tuple(states), tuple(WeightedMeasure(m, w) for m, w in pairs), require_normalized)

    @classmethod
    def singleton(cls, measure: ProbMeasure) -> "WeightedBeliefSet":
        return cls(measure.states, (WeightedMeasure(measure, _ONE),))

    @classmethod
    def unweighted(cls, measures: Iterable[ProbMeasure]) -> "WeightedBeliefSet":
        measures = list(measures)
        return cls(measures[0].states, tuple(WeightedMeasure(m, _ONE) for m in measures))

    @classmethod
    def empty(cls, states: Sequence[str]) -> "WeightedBeliefSet":
        return cls(tuple(states), (), False)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def is_empty(self) -> bool:
        return not self.members

    @property
    def measures(self) -> tuple[ProbMeasure, ...]:
        return tuple(wm.measure for wm in self.members)

    @property
    def max_weight(self) -> Fraction:
        return max((wm.weight for wm in self.members), default=_ZERO)

    def normalized(self) -> "WeightedBeliefSet":
        """Rescale weights so the largest is 1 (choices are invariant under this)."""
        top = self.max_weight
        if top == 0 or top == 1:
            return self
        return WeightedBeliefSet(self.states, tuple(WeightedMeasure(wm.measure, wm.weight / top) for wm in self.members), False)

    def to_jsonable(self):
        return [{"weight": str(wm.weight), "masses": wm.measure.to_jsonable()} for wm in self.members]


class UpdateRule(enum.Enum):
    PRIOR_BY_PRIOR = "prior-by-prior"
    LIKELIHOOD = "likelihood"

    @classmethod
    def parse(cls, value) -> "UpdateRule":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"p": cls.PRIOR_BY_PRIOR, "prior": cls.PRIOR_BY_PRIOR, "prior-by-prior": cls.PRIOR_BY_PRIOR,
                   "l": cls.LIKELIHOOD, "likelihood": cls.LIKELIHOOD}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown update rule {value!r}; use 'prior' or 'likelihood'") from None

    @property
    def symbol(self) -> str:
        return "p" if self is UpdateRule.PRIOR_BY_PRIOR else "l"


def _check_event(bel_states: Sequence[str], e: Iterable[str]) -> frozenset:
    ev = frozenset(e)
    unknown = ev - set(bel_states)
    if unknown:
        raise ValueError(f"event mentions unknown states {sorted(unknown)}")
    return ev


def upper_weighted_prob(bel: WeightedBeliefSet, e: Iterable[str]) -> Fraction:
    """Largest weighted probability ``weight * Pr(e)`` over the members (0 when empty)."""
    ev = _check_event(bel.states, e)
    return max((wm.weight * wm.measure.prob(ev) for wm in bel.members), default=_ZERO)


def update(bel: WeightedBeliefSet, e: Iterable[str], rule: UpdateRule | str) -> WeightedBeliefSet:
    """Condition every member with ``Pr(e) > 0`` on ``e``.

    Prior-by-prior keeps each weight. Likelihood updating rescales to
    ``weight * Pr(e) / upper_weighted_prob(bel, e)``. Members whose
    conditionals coincide are merged, keeping the largest weight. The result
    may be empty. Updating on the whole state space returns ``bel`` itself.
    """
    rule = UpdateRule.parse(rule)
    ev = _check_event(bel.states, e)
    if len(ev) == len(bel.states):
        # learning nothing leaves beliefs untouched (this also keeps defective rows as given)
        return bel
    top = upper_weighted_prob(bel, ev)
    if rule is UpdateRule.LIKELIHOOD and top == 0:
        return WeightedBeliefSet.empty(bel.states)
    merged: dict[tuple, list] = {}
    for wm in bel.members:
        pe = wm.measure.prob(ev)
        if pe == 0:
            continue
        cond = wm.measure.condition(ev)
        w = wm.weight if rule is UpdateRule.PRIOR_BY_PRIOR else wm.weight * pe / top
        slot = merged.get(cond.mass)
        if slot is None:
            merged[cond.mass] = [cond, w]
        elif w > slot[1]:
            slot[1] = w
    return WeightedBeliefSet(bel.states, tuple(WeightedMeasure(m, w) for m, w in merged.values()), False)


def c_generators(bel: WeightedBeliefSet) -> list[tuple[Fraction, ...]]:
    """The subprobabilities ``weight * Pr``; C(P+) is the union of boxes below them."""
    return [wm.subprobability for wm in bel.members]


def _check_sub(bel: WeightedBeliefSet, q: Sequence) -> tuple[Fraction, ...]:
    q = as_fraction_tuple(q, what="subprobability")
    if len(q) != len(bel.states):
        raise ValueError(f"subprobability has {len(q)} entries for {len(bel.states)} states")
    return q


def in_c(bel: WeightedBeliefSet, q: Sequence) -> bool:
    """Is ``q`` dominated componentwise by some generator of C(P+)?"""
    q = _check_sub(bel, q)
    if any(v < 0 for v in q):
        return False
    return any(all(a <= g for a, g in zip(q, gen)) for gen in c_generators(bel))


def in_convex_c(bel: WeightedBeliefSet, q: Sequence) -> bool:
    """Is ``q`` dominated by a convex combination of the generators? Decided by exact LP."""
    q = _check_sub(bel, q)
    gens = c_generators(bel)
    if not gens or any(v < 0 for v in q):
        return False
    if any(all(a <= g for a, g in zip(q, gen)) for gen in gens):
        return True
    for s, v in enumerate(q):
        if v > max(g[s] for g in gens):
            return False
    return dominated_by_hull(q, gens) is not None


def upper_expectation(bel: WeightedBeliefSet, theta: Sequence) -> Fraction:
    """Maximum weighted expected value ``max weight * E_Pr[theta]`` for ``theta >= 0``."""
    theta = as_fraction_tuple(theta, what="theta")
    if len(theta) != len(bel.states):
        raise ValueError("theta has the wrong dimension")
    if any(t < 0 for t in theta):
        raise ValueError("theta must be nonnegative")
    return max((wm.weight * wm.measure.expectation(theta) for wm in bel.members), default=_ZERO)


def c_is_box(bel: WeightedBeliefSet) -> bool:
    """True when one generator dominates all others, so C(P+) is a single (convex) box.

    The empty set gives C(P+) = {0}, which also counts.
    """
    gens = c_generators(bel)
    if not gens:
        return True
    return any(all(all(a <= b for a, b in zip(other, g)) for other in gens) for g in gens)


def sigma_algebra(space: StateSpace, cap: int | None = None, extra: Iterable[Iterable[str]] = ()) -> list[frozenset]:
    """All unions of atoms of the partition generated by the basis events (plus ``extra``).

    Ordered by size, then by the position of states in ``space.states``.
    """
    cap = Caps().sigma if cap is None else cap
    generators = [ev for _, ev in space.event_basis] + [frozenset(e) for e in extra]
    atoms: dict[tuple[bool, ...], list[str]] = {}
    for s in space.states:
        sig = tuple(s in ev for ev in generators)
        atoms.setdefault(sig, []).append(s)
    atom_list = [frozenset(a) for a in atoms.values()]
    size = 2 ** len(atom_list)
    if size > cap:
        from .caps import CapExceeded

        raise CapExceeded("sigma", size, cap)
    events = []
    for mask in range(size):
        ev = frozenset().union(*(atom_list[i] for i in range(len(atom_list)) if mask >> i & 1))
        events.append(ev)
    order = {s: i for i, s in enumerate(space.states)}
    events.sort(key=lambda ev: (len(ev), sorted(order[s] for s in ev)))
    return events
