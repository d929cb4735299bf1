"""Brute-force reference computations for the test suite.

Nothing here imports the package: measures are plain tuples of Fractions,
acts are plain payoff tuples, and every quantity is computed by direct
enumeration over members and states.
"""

from __future__ import annotations

from fractions import Fraction as F
from itertools import product


def best(menu):
    return tuple(max(a[s] for a in menu) for s in range(len(menu[0])))


def regrets(menu, act):
    b = best(menu)
    return tuple(b[s] - act[s] for s in range(len(act)))


def weighted_regret(menu, act, members):
    """max over (mass, weight) of weight * sum_s mass[s] * regret[s]; 0 if no members."""
    r = regrets(menu, act)
    vals = []
    for mass, weight in members:
        total = F(0)
        for s in range(len(act)):
            total += mass[s] * r[s]
        vals.append(weight * total)
    return max(vals) if vals else F(0)


def worst_regret(menu, act, states=None):
    r = regrets(menu, act)
    idx = range(len(act)) if states is None else states
    return max(r[s] for s in idx)


def prob(mass, event):
    return sum((mass[s] for s in event), F(0))


def condition(mass, event):
    p = prob(mass, event)
    return tuple(mass[s] / p if s in event else F(0) for s in range(len(mass)))


def update(members, event, rule):
    """Members are (mass, weight) with states as indices; rule 'p' or 'l'. Duplicates merge by max."""
    event = set(event)
    if members and len(event) == len(members[0][0]):
        return list(members)
    top = max((w * prob(m, event) for m, w in members), default=F(0))
    out = {}
    for m, w in members:
        pe = prob(m, event)
        if pe == 0:
            continue
        c = condition(m, event)
        nw = w if rule == "p" else w * pe / top
        out[c] = max(out.get(c, F(0)), nw)
    return list(out.items())


def argmin(values):
    low = min(values.values())
    return sorted(k for k, v in values.items() if v == low)


def mwer_choice(menu_acts, choice_acts, members):
    """menu_acts / choice_acts map labels to payoff tuples."""
    menu = list(menu_acts.values())
    return argmin({k: weighted_regret(menu, a, members) for k, a in choice_acts.items()})


def hull_dominates(point, gens):
    """Is point <= some convex combination of gens?  Decided with scipy's LP (floating point)."""
    import numpy as np
    from scipy.optimize import linprog

    k, n = len(gens), len(point)
    G = np.array([[float(g[s]) for g in gens] for s in range(n)])
    res = linprog(np.zeros(k), A_ub=-G, b_ub=-np.array([float(p) for p in point]),
                  A_eq=np.ones((1, k)), b_eq=[1.0], bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def all_subsets(items):
    items = list(items)
    for mask in range(1, 2 ** len(items)):
        yield [items[i] for i in range(len(items)) if mask >> i & 1]


def plans_of(action_sets):
    return list(product(*action_sets))
