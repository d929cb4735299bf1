"""Dynamic-consistency checkers.

Every checker returns a :class:`~regretlab.report.CheckReport`. Conditional
belief sets used by the separability, rectangularity and cross-validation
checks are rescaled so that their largest weight is 1. Choices are
unaffected by that rescaling, but the numeric identities being tested are
only meaningful for normalized sets.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .beliefs import (
    UpdateRule,
    WeightedBeliefSet,
    c_generators,
    in_c,
    sigma_algebra,
    update,
    upper_weighted_prob,
)
from .caps import Caps
from .lp import dominated_by_hull
from .regret import Act, DecisionRule, Menu, choice_values, mwer
from .report import CheckReport, merge_reports
from .tree import DecisionTree, History, MenuPolicy, MenuPolicyKind, Plan, menu_at

_ZERO = Fraction(0)
GUARD_NOTE = "side-condition unmet"


@dataclass(frozen=True)
class ChoiceContext:
    """Decision rule, beliefs, updating rule and menu policy used at every history."""

    rule: DecisionRule = DecisionRule.MWER
    beliefs: WeightedBeliefSet | None = None
    update: UpdateRule = UpdateRule.LIKELIHOOD
    menu_policy: MenuPolicy = field(default_factory=MenuPolicy.constant)

    def __post_init__(self):
        object.__setattr__(self, "rule", DecisionRule.parse(self.rule))
        object.__setattr__(self, "update", UpdateRule.parse(self.update))
        object.__setattr__(self, "menu_policy", MenuPolicy.parse(self.menu_policy))
        if self.rule.needs_beliefs and self.beliefs is None:
            raise ValueError(f"rule {self.rule.value} needs beliefs")

    def replace(self, **changes) -> "ChoiceContext":
        from dataclasses import replace

        return replace(self, **changes)

    def beliefs_given(self, event: Iterable[str]) -> WeightedBeliefSet | None:
        if self.beliefs is None:
            return None
        return update(self.beliefs, event, self.update)

    def describe(self) -> dict:
        return {"rule": self.rule.value, "update": self.update.value, "menu_policy": self.menu_policy.name}

    def summary(self) -> str:
        return " ".join(f"{k}={v}" for k, v in self.describe().items())


@dataclass
class ChoiceAt:
    """Everything computed when choosing at one history."""

    history: History
    event: frozenset
    menu: Menu
    candidates: list[Act]
    values: dict[tuple, Fraction]
    chosen: list[Act]
    beliefs: WeightedBeliefSet | None

    def is_chosen(self, act: Act) -> bool:
        return any(a.payoff == act.payoff for a in self.chosen)

    def value(self, act: Act) -> Fraction:
        return self.values[act.payoff]


def choice_at(t: DecisionTree, ctx: ChoiceContext, h: History | str, plans: Sequence[Plan] | None = None) -> ChoiceAt:
    """Choose among the acts of plans feasible at ``h``, evaluated against ``menu_at(h)``."""
    h = t.history(h)
    plans = t.enumerate_plans() if plans is None else plans
    event = t.possible_states(h)
    menu = menu_at(t, h, ctx.menu_policy, plans)
    feasible = Menu([t.plan_to_act(p) for p in plans if t.is_feasible(p, h)], t.states)
    bel = ctx.beliefs_given(event)
    scored = choice_values(ctx.rule, menu, feasible, bel, event)
    low = min(v for _, v in scored)
    return ChoiceAt(h, event, menu, list(feasible), {a.payoff: v for a, v in scored},
                    [a for a, v in scored if v == low], bel)


def check_no_reversal(t: DecisionTree, ctx: ChoiceContext, caps: Caps | None = None) -> CheckReport:
    """Look for a plan chosen at ``h``, still feasible at an extension ``h'``, but not chosen there."""
    caps = caps or Caps.from_env()
    plans = t.enumerate_plans(caps)
    acts = {p: t.plan_to_act(p) for p in plans}
    decisions = t.histories(include_leaves=False)
    at = {h: choice_at(t, ctx, h, plans) for h in decisions}
    witnesses = []
    pairs = 0
    seen = set()
    for h in decisions:
        for h2 in decisions:
            if h2 == h or not h.is_prefix_of(h2):
                continue
            pairs += 1
            c1, c2 = at[h], at[h2]
            for p in plans:
                f = acts[p]
                if not c1.is_chosen(f) or not t.is_feasible(p, h2) or c2.is_chosen(f):
                    continue
                key = (h, h2, f.payoff)
                if key in seen:
                    continue
                seen.add(key)
                witnesses.append({
                    "history": h, "later_history": h2, "plan": p.label, "act": f,
                    "chosen_before": [a.label for a in c1.chosen],
                    "chosen_after": [a.label for a in c2.chosen],
                    "value_before": c1.value(f), "value_after": c2.value(f),
                    "best_value_after": c2.value(c2.chosen[0]),
                })
    stats = {"histories": len(decisions), "history_pairs": pairs, "plans": len(plans)}
    return CheckReport("no-reversal", not witnesses, witnesses, stats, notes=[f"context: {ctx.summary()}"])


# ---------------------------------------------------------------------- separability

def _cond(bel: WeightedBeliefSet, event: frozenset, rule: UpdateRule) -> WeightedBeliefSet:
    return update(bel, event, rule).normalized()


def _mix_max(bel_f: WeightedBeliefSet, g1: frozenset, g2: frozenset, c1: Fraction, c2: Fraction) -> Fraction:
    return max((wm.weight * (wm.measure.prob(g1) * c1 + wm.measure.prob(g2) * c2) for wm in bel_f.members), default=_ZERO)


def check_sep(bel: WeightedBeliefSet, m: Menu, f: Act, e: Iterable[str], fvt: Iterable[str],
              rule: UpdateRule | str) -> CheckReport:
    """Separability of the weighted regret of ``f`` across ``e & fvt`` and ``fvt - e``."""
    rule = UpdateRule.parse(rule)
    e, fvt = frozenset(e), frozenset(fvt)
    g1, g2 = e & fvt, fvt - e
    cell = {"E": e, "F": fvt, "act": f.label}
    if upper_weighted_prob(bel, g1) == 0 or upper_weighted_prob(bel, g2) == 0:
        return CheckReport("sep", True, stats={"cells": 1, "guard_skipped": 1}, notes=[GUARD_NOTE])
    bf = _cond(bel, fvt, rule)
    lhs = mwer(m, f, bf)
    c1 = mwer(m, f, _cond(bel, g1, rule))
    c2 = mwer(m, f, _cond(bel, g2, rule))
    rhs = _mix_max(bf, g1, g2, c1, c2)
    witnesses = []
    ok1 = lhs == rhs
    if not ok1:
        witnesses.append({**cell, "clause": "equality", "lhs": lhs, "rhs": rhs, "regret_E_and_F": c1, "regret_Ec_and_F": c2})
    ok2 = True
    if c1 != 0:
        bound = _mix_max(bf, g1, g2, _ZERO, c2)
        ok2 = lhs > bound
        if not ok2:
            witnesses.append({**cell, "clause": "strict", "lhs": lhs, "bound": bound, "regret_E_and_F": c1, "regret_Ec_and_F": c2})
    return CheckReport("sep", ok1 and ok2, witnesses, {"cells": 1, "guard_skipped": 0},
                       {"equality": ok1, "strict": ok2})


def check_sep_all(bel: WeightedBeliefSet, m: Menu, algebra: Sequence[frozenset], rule: UpdateRule | str,
                  acts: Iterable[Act] | None = None, max_witnesses: int = 50) -> CheckReport:
    """:func:`check_sep` over every pair of measurable events and every act (default: the menu)."""
    rule = UpdateRule.parse(rule)
    acts = list(m) if acts is None else list(acts)
    reports = [check_sep(bel, m, f, e, fvt, rule) for f in acts for fvt in algebra for e in algebra]
    merged = merge_reports("sep", reports, max_witnesses)
    merged.components.setdefault("equality", True)
    merged.components.setdefault("strict", True)
    return merged


# ---------------------------------------------------------------------- rectangularity

def _dominated(p: Sequence[Fraction], q: Sequence[Fraction]) -> bool:
    return all(a <= b for a, b in zip(p, q))


def check_rectangularity(bel: WeightedBeliefSet, algebra: Sequence[frozenset], rule: UpdateRule | str,
                         seed: int = 0, probes: int = 16, max_witnesses: int = 50) -> CheckReport:
    """Check parts (a), (b) and (c) of the rectangularity condition for every measurable E and F."""
    rule = UpdateRule.parse(rule)
    rng = random.Random(seed)
    n = len(bel.states)
    cond_cache: dict[frozenset, WeightedBeliefSet] = {}

    def cond(ev):
        if ev not in cond_cache:
            cond_cache[ev] = _cond(bel, ev, rule)
        return cond_cache[ev]

    wit = {"a": [], "b": [], "c": []}
    stats = {"pairs": 0, "lp_calls": 0, "falsified_by_probe": 0, "b_guard_skipped": 0}
    zero = tuple(_ZERO for _ in range(n))
    for fvt in algebra:
        if upper_weighted_prob(bel, fvt) == 0:
            stats["b_guard_skipped"] += len(algebra)
            continue
        bf = cond(fvt)
        for e in algebra:
            stats["pairs"] += 1
            g1, g2 = e & fvt, fvt - e
            b1, b2 = cond(g1), cond(g2)
            gens1 = c_generators(b1) or [zero]
            gens2 = c_generators(b2) or [zero]
            mixed = []
            for wm in bf.members:
                w1 = wm.weight * wm.measure.prob(g1)
                w2 = wm.weight * wm.measure.prob(g2)
                for x in gens1:
                    for y in gens2:
                        mixed.append(tuple(w1 * a + w2 * b for a, b in zip(x, y)))
            # (a): mixtures of genuine conditionals must stay inside C of the conditioned set
            if not b1.is_empty and not b2.is_empty and len(wit["a"]) < max_witnesses:
                for q in dict.fromkeys(mixed):
                    if not in_c(bf, q):
                        wit["a"].append({"E": e, "F": fvt, "mixture": q})
                        break
            # (b): exact form of the small-delta condition
            if upper_weighted_prob(bel, g1) == 0:
                stats["b_guard_skipped"] += 1
            else:
                r = max(wm.weight * wm.measure.prob(g2) for wm in bf.members)
                if not any(wm.weight * wm.measure.prob(g2) == r and wm.measure.prob(g1) > 0 for wm in bf.members):
                    if len(wit["b"]) < max_witnesses:
                        wit["b"].append({"E": e, "F": fvt, "sup_Ec_and_F": r})
            # (c): upper expectations decompose; random directions first, then exact LP per generator
            if len(wit["c"]) >= max_witnesses:
                continue
            targets = c_generators(bf)
            failed = None
            for _ in range(probes):
                theta = [Fraction(rng.randint(0, 6)) for _ in range(n)]
                lhs = max(sum((a * t for a, t in zip(q, theta)), _ZERO) for q in mixed)
                rhs = max(sum((a * t for a, t in zip(p, theta)), _ZERO) for p in targets)
                if lhs < rhs:
                    failed = {"E": e, "F": fvt, "theta": theta, "lhs": lhs, "rhs": rhs}
                    stats["falsified_by_probe"] += 1
                    break
            if failed is None:
                for p in targets:
                    if any(_dominated(p, q) for q in mixed):
                        continue
                    stats["lp_calls"] += 1
                    if dominated_by_hull(p, mixed) is None:
                        failed = {"E": e, "F": fvt, "generator": p}
                        break
            if failed is not None:
                wit["c"].append(failed)
    components = {k: not v for k, v in wit.items()}
    witnesses = [{"part": k, **w} for k in ("a", "b", "c") for w in wit[k]]
    return CheckReport("rectangularity", all(components.values()), witnesses, stats, components,
                       [f"update: {rule.value}"])


# ---------------------------------------------------------------------- axioms

def _subsets(n: int, caps: Caps, seed: int) -> tuple[list[tuple[int, ...]], bool]:
    total = 2 ** n - 1
    if total <= caps.subsets:
        out = [c for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]
        return out, False
    rng = random.Random(seed)
    picked = {tuple(range(n))}
    while len(picked) < caps.subsets:
        mask = rng.getrandbits(n)
        if mask:
            picked.add(tuple(i for i in range(n) if mask >> i & 1))
    return sorted(picked, key=lambda c: (len(c), c)), True


def _argmin(values: Sequence[Fraction], idx: Sequence[int]) -> frozenset:
    low = min(values[i] for i in idx)
    return frozenset(i for i in idx if values[i] == low)


def check_axioms_menu(menu: Menu, algebra: Sequence[frozenset], rule: DecisionRule | str,
                      beliefs: WeightedBeliefSet | None, update_rule: UpdateRule | str,
                      caps: Caps | None = None, seed: int = 0, max_witnesses: int = 50,
                      choice_sets: Sequence[Sequence[Act]] | None = None,
                      dcm_cells: Sequence[tuple[frozenset, frozenset]] | None = None) -> CheckReport:
    """Check DC-M, Conditional Preference, nonemptiness and Sen's alpha for one evaluation menu.

    Choice sets range over nonempty subsets of ``menu`` (sampled beyond the
    subset cap) unless ``choice_sets`` is given. ``dcm_cells`` restricts
    DC-M to the listed (E, F) pairs.
    """
    caps = caps or Caps.from_env()
    rule = DecisionRule.parse(rule)
    update_rule = UpdateRule.parse(update_rule)
    if menu.states is None:
        raise ValueError("the menu must carry state names")
    pos = {s: i for i, s in enumerate(menu.states)}
    acts = list(menu)
    labels = [a.label for a in acts]
    values: dict[frozenset, list[Fraction]] = {}
    for ev in algebra:
        bel = None if beliefs is None else update(beliefs, ev, update_rule)
        values[ev] = [v for _, v in choice_values(rule, menu, acts, bel, ev)]

    def vals(ev):
        if ev not in values:
            bel = None if beliefs is None else update(beliefs, ev, update_rule)
            values[ev] = [v for _, v in choice_values(rule, menu, acts, bel, ev)]
        return values[ev]

    sampled = False
    if choice_sets is None:
        subsets, sampled = _subsets(len(acts), caps, seed)
    else:
        subsets = [tuple(acts.index(menu.find(a)) for a in cs) for cs in choice_sets]
    if dcm_cells is None:
        cells = []
        seen = set()
        for fvt in algebra:
            for e in algebra:
                g1, g2 = e & fvt, fvt - e
                if g1 and g2 and (g1, g2) not in seen:
                    seen.add((g1, g2))
                    cells.append((e, fvt))
    else:
        cells = list(dcm_cells)

    wit = {"dc-m": [], "conditional-preference": [], "nonempty": [], "sens-alpha": []}

    def add(kind, w):
        if len(wit[kind]) < max_witnesses:
            wit[kind].append(w)

    def names(idx):
        return [labels[i] for i in sorted(idx)]

    for sub in subsets:
        for e, fvt in cells:
            g1, g2 = e & fvt, fvt - e
            c1, c2, cf = _argmin(vals(g1), sub), _argmin(vals(g2), sub), _argmin(vals(fvt), sub)
            both = c1 & c2
            missing = both - cf
            if missing:
                i = min(missing)
                add("dc-m", {"clause": 1, "E": e, "F": fvt, "choice_set": names(sub), "act": labels[i],
                             "chosen_E_and_F": names(c1), "chosen_Ec_and_F": names(c2), "chosen_F": names(cf)})
            if both:
                wrong = (set(sub) - c1) & cf
                if wrong:
                    i = min(wrong)
                    add("dc-m", {"clause": 2, "E": e, "F": fvt, "choice_set": names(sub), "act": labels[i],
                                 "chosen_E_and_F": names(c1), "chosen_Ec_and_F": names(c2), "chosen_F": names(cf)})
        for ev in algebra:
            ch = _argmin(vals(ev), sub)
            if not ch or not ch <= set(sub):
                add("nonempty", {"E": ev, "choice_set": names(sub), "chosen": names(ch)})
            for i, j in itertools.combinations(sub, 2):
                if all(acts[i].payoff[pos[s]] == acts[j].payoff[pos[s]] for s in ev):
                    if (i in ch) != (j in ch):
                        add("conditional-preference", {"E": ev, "choice_set": names(sub), "acts": [labels[i], labels[j]], "chosen": names(ch)})
            if len(sub) > 1:
                for drop in sub:
                    smaller = tuple(k for k in sub if k != drop)
                    ch2 = _argmin(vals(ev), smaller)
                    lost = (ch - {drop}) - ch2
                    if lost:
                        add("sens-alpha", {"E": ev, "choice_set": names(sub), "removed": labels[drop],
                                           "act": labels[min(lost)], "chosen_before": names(ch), "chosen_after": names(ch2)})
    components = {k: not v for k, v in wit.items()}
    witnesses = [{"axiom": k, **w} for k, v in wit.items() for w in v]
    stats = {"events": len(algebra), "choice_sets": len(subsets), "dcm_cells": len(cells), "acts": len(acts),
             "sampled": int(sampled)}
    notes = ["choice sets sampled beyond the subset cap"] if sampled else []
    return CheckReport("axioms", all(components.values()), witnesses, stats, components, notes)


def problem_algebra(t: DecisionTree, caps: Caps | None = None) -> list[frozenset]:
    """Events generated by the declared basis and every possible-state set of the tree."""
    caps = caps or Caps.from_env()
    extra = {t.possible_states(h) for h in t.histories(include_leaves=False)}
    return sigma_algebra(t.space, caps.sigma, sorted(extra, key=lambda ev: t.space.sort_event(ev)))


def initial_menu(t: DecisionTree, ctx: ChoiceContext, caps: Caps | None = None) -> Menu:
    plans = t.enumerate_plans(caps)
    if ctx.menu_policy.kind is MenuPolicyKind.EXPLICIT:
        return menu_at(t, History(t.states[0]), ctx.menu_policy, plans)
    return Menu([t.plan_to_act(p) for p in plans], t.states)


def check_axioms(t: DecisionTree, ctx: ChoiceContext, caps: Caps | None = None, seed: int = 0) -> CheckReport:
    """DC-M, conditional preference, nonemptiness and Sen's alpha for the initial menu, over the measurable events."""
    caps = caps or Caps.from_env()
    menu = initial_menu(t, ctx, caps)
    algebra = problem_algebra(t, caps)
    report = check_axioms_menu(menu, algebra, ctx.rule, ctx.beliefs, ctx.update, caps, seed)
    report.notes.append(f"context: {ctx.summary()}")
    return report


# ---------------------------------------------------------------------- cross-validation

@dataclass
class Instance:
    """A belief set, an initial menu and the measurable events, as used by the harness."""

    name: str
    beliefs: WeightedBeliefSet
    menu: Menu
    algebra: list[frozenset]

    @classmethod
    def from_tree(cls, name: str, t: DecisionTree, beliefs: WeightedBeliefSet, caps: Caps | None = None) -> "Instance":
        return cls(name, beliefs, Menu([t.plan_to_act(p) for p in t.enumerate_plans(caps)], t.states), problem_algebra(t, caps))


def _probe(menu: Menu, regrets: Sequence[Fraction], label: str) -> Act:
    return Act(tuple(b - r for b, r in zip(menu.best, regrets)), label)


def axiom_verdict(inst: Instance, rule: UpdateRule | str, caps: Caps | None = None) -> CheckReport:
    """Axioms on the initial menu, plus the two-act probe problems that expose SEP failures.

    For each act f and cell (E, F) with both parts of positive upper
    weighted probability, two probe acts are added to the menu: one whose
    regret is constant on each part and equal to f's conditional regrets
    there, and one with zero regret on ``E & F``. DC-M is then checked on the
    choice set {f, probe}.
    """
    rule = UpdateRule.parse(rule)
    caps = caps or Caps.from_env()
    base = check_axioms_menu(inst.menu, inst.algebra, DecisionRule.MWER, inst.beliefs, rule, caps)
    reports = [base]
    idx = {s: i for i, s in enumerate(inst.menu.states)}
    probes = 0
    for f in inst.menu:
        for fvt in inst.algebra:
            for e in inst.algebra:
                g1, g2 = e & fvt, fvt - e
                if upper_weighted_prob(inst.beliefs, g1) == 0 or upper_weighted_prob(inst.beliefs, g2) == 0:
                    continue
                c1 = mwer(inst.menu, f, _cond(inst.beliefs, g1, rule))
                c2 = mwer(inst.menu, f, _cond(inst.beliefs, g2, rule))
                for kind, r1 in (("split", c1), ("zero", _ZERO)):
                    reg = [_ZERO] * len(idx)
                    for s in g1:
                        reg[idx[s]] = r1
                    for s in g2:
                        reg[idx[s]] = c2
                    probe = _probe(inst.menu, reg, f"probe-{kind}")
                    if probe.payoff == f.payoff:
                        continue
                    menu = inst.menu.union([probe])
                    probes += 1
                    r = check_axioms_menu(menu, [g1, g2, fvt], DecisionRule.MWER, inst.beliefs, rule, caps,
                                          choice_sets=[[menu.find(f), menu.find(probe)]], dcm_cells=[(e, fvt)])
                    if not r.passed:
                        for w in r.witnesses:
                            w["probe_for"] = f.label
                    reports.append(r)
    merged = merge_reports("axioms+probes", reports, 20)
    merged.stats["probes"] = probes
    return merged


def cross_validate_thm2(instances: Iterable[Instance], rule: UpdateRule | str, caps: Caps | None = None) -> CheckReport:
    """Compare the axiom verdict with the separability verdict on each instance."""
    rule = UpdateRule.parse(rule)
    witnesses = []
    counts = {"instances": 0, "both_pass": 0, "both_fail": 0, "disagree": 0}
    for inst in instances:
        counts["instances"] += 1
        ax = axiom_verdict(inst, rule, caps)
        sep = check_sep_all(inst.beliefs, inst.menu, inst.algebra, rule)
        if ax.passed and sep.passed:
            counts["both_pass"] += 1
        elif not ax.passed and not sep.passed:
            counts["both_fail"] += 1
        else:
            counts["disagree"] += 1
            witnesses.append({"instance": inst.name, "axioms": ax.verdict, "sep": sep.verdict,
                              "axiom_witnesses": ax.witnesses[:3], "sep_witnesses": sep.witnesses[:3]})
    return CheckReport("thm2-cross-validation", not witnesses, witnesses, counts, notes=[f"update: {rule.value}"])
