"""Built-in decision problems and a seeded random problem generator.

Each built-in scenario carries a list of :class:`Expectation` entries, small
queries whose answers are replayed against the engine by the test suite.

Query syntax (``@tree`` selects one of ``extra_trees``)::

    value:<context>:<history>:<plan>     rule value of the plan's act at a history
    choice:<context>:<history>           sorted plan labels of the chosen acts
    reversal:<context>                   "pass" or "fail"
    weights:<update>:<event>             weight of each original member after updating (None if dropped)
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .beliefs import ProbMeasure, StateSpace, UpdateRule, WeightedBeliefSet, update
from .consistency import ChoiceContext, check_no_reversal, choice_at
from .regret import Act, DecisionRule
from .tree import DecisionTree, History, MenuPolicy

F = Fraction


@dataclass(frozen=True)
class Expectation:
    query: str
    expected: Any
    provenance: str = "DERIVED"
    note: str = ""


@dataclass
class Scenario:
    name: str
    tree: DecisionTree
    beliefs: WeightedBeliefSet | None
    contexts: dict[str, ChoiceContext]
    expected: list[Expectation] = field(default_factory=list)
    aliases: dict[str, str] = field(default_factory=dict)
    extra_trees: dict[str, DecisionTree] = field(default_factory=dict)
    description: str = ""

    def resolve_history(self, text: str, tree: DecisionTree | None = None) -> History:
        tree = tree or self.tree
        return tree.history(self.aliases.get(text, text))

    def _tree(self, name: str | None) -> DecisionTree:
        if name is None:
            return self.tree
        try:
            return self.extra_trees[name]
        except KeyError:
            raise KeyError(f"scenario {self.name!r} has no tree {name!r}") from None

    def query(self, text: str):
        body, _, tree_name = text.partition("@")
        tree = self._tree(tree_name or None)
        kind, *args = body.split(":")
        if kind == "value":
            ctx_name, hist, plan_label = args
            ctx = self.contexts[ctx_name]
            at = choice_at(tree, ctx, self.resolve_history(hist, tree))
            plan = tree.make_plan(plan_label.split("-"))
            return at.value(tree.plan_to_act(plan))
        if kind == "choice":
            ctx_name, hist = args
            at = choice_at(tree, self.contexts[ctx_name], self.resolve_history(hist, tree))
            return sorted(label for a in at.chosen for label in a.label.split("|"))
        if kind == "reversal":
            (ctx_name,) = args
            return check_no_reversal(tree, self.contexts[ctx_name]).verdict
        if kind == "weights":
            rule, event_name = args
            if self.beliefs is None:
                raise ValueError("scenario has no beliefs")
            ev = tree.space.named(event_name)
            post = update(self.beliefs, ev, UpdateRule.parse(rule))
            by_mass = {wm.measure.mass: wm.weight for wm in post.members}
            out = []
            for wm in self.beliefs.members:
                if wm.measure.prob(ev) == 0:
                    out.append(None)
                else:
                    out.append(by_mass[wm.measure.condition(ev).mass])
            return out
        raise ValueError(f"unknown query kind {kind!r}")

    def replay(self) -> list[tuple[Expectation, Any, bool]]:
        results = []
        for exp in self.expected:
            actual = self.query(exp.query)
            results.append((exp, actual, actual == exp.expected))
        return results


# ---------------------------------------------------------------------- built-ins

def _procrastination_tree(p1, p2, g1, g2) -> DecisionTree:
    space = StateSpace(("hard", "easy"), (("Hard", {"hard"}), ("Easy", {"easy"})))
    p1, p2, g1, g2 = (F(v) for v in (p1, p2, g1, g2))
    leaves = {}
    for s in space.states:
        hard = s == "hard"
        leaves[f"{s}/study"] = g1 if hard else F(0)
        leaves[f"{s}/play/study"] = p1
        leaves[f"{s}/play/play"] = p1 + p2 - (g2 if hard else 0)
    isets = {"day1": ["hard", "easy"], "day2": ["hard/play", "easy/play"]}
    return DecisionTree.from_leaves(space, leaves, isets)


def procrastination(p1=10, p2=10, g1=25, g2=15) -> Scenario:
    """Study now, study later, or never: a reversal appears when forgone plans are dropped."""
    t = _procrastination_tree(p1, p2, g1, g2)
    contexts = {
        "constant": ChoiceContext(DecisionRule.MINIMAX_REGRET, None, UpdateRule.LIKELIHOOD, MenuPolicy.constant()),
        "feasible": ChoiceContext(DecisionRule.MINIMAX_REGRET, None, UpdateRule.LIKELIHOOD, MenuPolicy.feasible()),
    }
    p1, p2, g1, g2 = (F(v) for v in (p1, p2, g1, g2))
    expected = [
        Expectation("value:constant:root:study-study", p1 + p2, "DERIVED", "worst case p1+p2"),
        Expectation("value:constant:root:play-study", g1 - p1, "DERIVED", "worst case g1-p1"),
        Expectation("value:constant:root:play-play", g1 + g2 - p1 - p2, "DERIVED", "worst case g1+g2-p1-p2"),
        Expectation("choice:constant:root", ["play-study"], "DERIVED"),
        Expectation("value:feasible:play:play-study", p2, "DERIVED", "day two without forgone plans"),
        Expectation("value:feasible:play:play-play", g2 - p2, "DERIVED"),
        Expectation("choice:feasible:play", ["play-play"], "DERIVED"),
        Expectation("value:constant:play:play-study", g1 - p1, "DERIVED", "day two with forgone plans"),
        Expectation("value:constant:play:play-play", g1 + g2 - p1 - p2, "DERIVED"),
        Expectation("choice:constant:play", ["play-study"], "DERIVED"),
        Expectation("reversal:feasible", "fail", "DERIVED"),
        Expectation("reversal:constant", "pass", "DERIVED"),
    ]
    return Scenario("procrastination", t, None, contexts, expected, {"root": "hard", "play": "hard/play"},
                    description="Exam in two days; minimax regret; (p1,p2,g1,g2) = "
                                f"({p1},{p2},{g1},{g2}).")


EXAM_STATES = ("hard-short", "hard-long", "easy-short", "easy-long")


def _exam_tree() -> DecisionTree:
    space = StateSpace(EXAM_STATES, (("Hard", {"hard-short", "hard-long"}), ("Easy", {"easy-short", "easy-long"})))
    play_study = dict(zip(EXAM_STATES, (1, 0, 5, 0)))
    play_play = dict(zip(EXAM_STATES, (0, 3, 0, 3)))
    leaves = {}
    for s in EXAM_STATES:
        leaves[f"{s}/study"] = -10
        leaves[f"{s}/play/study"] = play_study[s]
        leaves[f"{s}/play/play"] = play_play[s]
    isets = {
        "day1": list(EXAM_STATES),
        "hard": ["hard-short/play", "hard-long/play"],
        "easy": ["easy-short/play", "easy-long/play"],
    }
    return DecisionTree.from_leaves(space, leaves, isets)


def _exam(name: str, pr2: ProbMeasure, expected: list[Expectation], description: str) -> Scenario:
    t = _exam_tree()
    pr1 = ProbMeasure.point(EXAM_STATES, "hard-short")
    bel = WeightedBeliefSet.of(EXAM_STATES, [(pr1, 1), (pr2, F(3, 5))])
    contexts = {
        "prior": ChoiceContext(DecisionRule.MWER, bel, UpdateRule.PRIOR_BY_PRIOR, MenuPolicy.constant()),
        "likelihood": ChoiceContext(DecisionRule.MWER, bel, UpdateRule.LIKELIHOOD, MenuPolicy.constant()),
        "prior-feasible": ChoiceContext(DecisionRule.MWER, bel, UpdateRule.PRIOR_BY_PRIOR, MenuPolicy.feasible()),
    }
    aliases = {"root": "hard-short", "hard": "hard-short/play", "easy": "easy-short/play"}
    return Scenario(name, t, bel, contexts, expected, aliases, description=description)


def exam_table1() -> Scenario:
    """Short or long, hard or easy exam; the second prior is taken as given, with total mass 3/5."""
    pr2 = ProbMeasure(EXAM_STATES, (0, F(1, 5), F(1, 5), F(1, 5)), defective=True)
    expected = [
        Expectation("value:prior:root:play-study-study", F(18, 25), "DERIVED", "0.6 * 0.2 * (3 + 3)"),
        Expectation("value:prior:root:play-play-play", F(1), "DERIVED", "Pr1 at hard-short"),
        Expectation("choice:prior:root", ["play-study-study"], "DERIVED"),
        Expectation("value:prior:hard:play-study-study", F(9, 5), "DERIVED", "0.6 * 3 after conditioning"),
        Expectation("value:prior:hard:play-play-play", F(1), "DERIVED"),
        Expectation("choice:prior:hard", ["play-play-play", "play-play-study"], "DERIVED"),
        Expectation("reversal:prior", "fail", "DERIVED", "reversal at the hard history"),
        Expectation("value:likelihood:hard:play-study-study", F(9, 25), "DERIVED", "weight 0.12 after updating"),
        Expectation("reversal:likelihood", "pass", "DERIVED"),
        Expectation("value:prior:easy:play-study-study", F(9, 10), "DERIVED"),
        Expectation("value:prior:easy:play-play-play", F(3, 2), "DERIVED", "no reversal on the easy branch"),
        Expectation("weights:likelihood:Hard", [F(1), F(3, 25)], "DERIVED", "0.6 * 0.2 / 1"),
        Expectation("weights:likelihood:Easy", [None, F(1)], "DERIVED", "Pr1 dropped"),
        Expectation("weights:prior:Hard", [F(1), F(3, 5)], "DERIVED"),
    ]
    return _exam("exam-table1", pr2, expected,
                 "Rows read literally as masses; weights 1 and 3/5; studying on day one pays -10 everywhere.")


def exam_table1_normalized() -> Scenario:
    """Same problem with the second prior rescaled to total mass 1."""
    pr2 = ProbMeasure(EXAM_STATES, (0, F(1, 3), F(1, 3), F(1, 3)))
    expected = [
        Expectation("value:prior:root:play-study-study", F(6, 5), "DERIVED", "0.6 * (1 + 1)"),
        Expectation("value:prior:root:play-play-play", F(1), "DERIVED", "max(1, 0.6 * 5/3)"),
        Expectation("choice:prior:root", ["play-play-play", "play-play-study"], "DERIVED", "differs from the literal reading"),
        Expectation("value:prior:easy:play-play-play", F(3, 2), "DERIVED"),
        Expectation("value:prior:easy:play-play-study", F(9, 10), "DERIVED"),
        Expectation("reversal:prior", "fail", "DERIVED", "reversal on the easy branch"),
    ]
    return _exam("exam-table1-normalized", pr2, expected,
                 "Second prior normalized to (0, 1/3, 1/3, 1/3); ex ante ranking differs from the literal reading.")


def _lost_cause_tree(after_l: tuple[tuple[int, int], tuple[int, int]], other: tuple[int, int], other_action: str) -> DecisionTree:
    space = StateSpace(("s1", "s2"))
    ll, lr = after_l
    leaves = {}
    for i, s in enumerate(space.states):
        leaves[f"{s}/{other_action}"] = other[i]
        leaves[f"{s}/L/L"] = ll[i]
        leaves[f"{s}/L/R"] = lr[i]
    isets = {"first": ["s1", "s2"], "after-L": ["s1/L", "s2/L"]}
    return DecisionTree.from_leaves(space, leaves, isets)


def lost_cause_search(grid: range = range(0, 5)) -> tuple[tuple, tuple, tuple]:
    """Smallest integer utilities (lexicographically) for two trees sharing the subtree after L.

    The left tree must have ex ante minimax-regret choice exactly {L-R}, the
    right tree exactly {L-L}.
    """
    from .regret import Menu, choice

    def unique_choice(ll, lr, other):
        m = Menu([Act(ll, "LL"), Act(lr, "LR"), Act(other, "X")])
        return [a.label for a in choice(DecisionRule.MINIMAX_REGRET, m, m)]

    vecs = [(a, b) for a in grid for b in grid]
    for ll in vecs:
        for lr in vecs:
            if ll == lr:
                continue
            left = next((x for x in vecs if x not in (ll, lr) and unique_choice(ll, lr, x) == ["LR"]), None)
            if left is None:
                continue
            right = next((y for y in vecs if y not in (ll, lr) and unique_choice(ll, lr, y) == ["LL"]), None)
            if right is not None:
                return (ll, lr), left, right
    raise RuntimeError("no utilities on the grid separate the two trees")


def lost_cause() -> Scenario:
    """Two trees that agree after the first move L but disagree about the best plan ex ante."""
    after_l, left, right = lost_cause_search()
    t_left = _lost_cause_tree(after_l, left, "A")
    t_right = _lost_cause_tree(after_l, right, "B")
    contexts = {
        "constant": ChoiceContext(DecisionRule.MINIMAX_REGRET, None, UpdateRule.LIKELIHOOD, MenuPolicy.constant()),
        "feasible": ChoiceContext(DecisionRule.MINIMAX_REGRET, None, UpdateRule.LIKELIHOOD, MenuPolicy.feasible()),
    }
    expected = [
        Expectation("choice:constant:root", ["L-R"], "DERIVED", "left tree"),
        Expectation("choice:constant:root@right", ["L-L"], "DERIVED", "right tree"),
        Expectation("reversal:constant", "pass", "DERIVED"),
        Expectation("reversal:constant@right", "pass", "DERIVED"),
    ]
    desc = (f"After L both trees offer L={after_l[0]} and R={after_l[1]}; the other first move pays "
            f"A={left} on the left and B={right} on the right (utilities found by grid search).")
    return Scenario("lost-cause", t_left, None, contexts, expected, {"root": "s1", "after-L": "s1/L"},
                    {"right": t_right}, desc)


P4C_STATES = ("s1", "s2", "s3")
P4C_ACTS = {
    "o10T": (10, 10, 5),
    "o7T": (7, 7, 5),
    "o20T": (20, 20, 5),
    "o1T": (1, 1, 5),
    "o10Ao7": (10, 7, 5),
    "o10Bo1": (1, 10, 5),
    "o20Ao1": (20, 1, 5),
    "o20Bo1": (1, 20, 5),
}


def p4c_counterexample() -> Scenario:
    """MER over three measures; composite acts evaluated against the menu {o1*, o7*, o10*, o20*, g}."""
    space = StateSpace(P4C_STATES, (("A", {"s1"}), ("B", {"s2"}), ("T", {"s1", "s2"})))
    leaves = {f"{s}/{name}": payoff[i] for name, payoff in P4C_ACTS.items() for i, s in enumerate(P4C_STATES)}
    t = DecisionTree.from_leaves(space, leaves, {"choose": list(P4C_STATES)})
    p1 = ProbMeasure(P4C_STATES, (F(1, 4), F(3, 4), 0))
    p2 = ProbMeasure(P4C_STATES, (0, 0, 1))
    p3 = ProbMeasure(P4C_STATES, (F(1, 4), 0, F(3, 4)))
    bel = WeightedBeliefSet.unweighted([p1, p2, p3])
    menu = [Act((k, k, k), f"o{k}*") for k in (1, 7, 10, 20)] + [Act((20, 23, 5), "g")]
    policy = MenuPolicy.parse("explicit", {"*": menu})
    contexts = {"mer": ChoiceContext(DecisionRule.MER, bel, UpdateRule.LIKELIHOOD, policy)}
    values = [
        ("o10T", F(15), "PAPER", ""),
        ("o7T", F(61, 4), "PAPER", ""),
        ("o20T", F(15), "PAPER", ""),
        ("o1T", F(85, 4), "PAPER", ""),
        ("o10Ao7", F(15), "PAPER", ""),
        ("o10Bo1", F(16), "DERIVED", "brute force gives 16, attained at p3"),
        ("o20Ao1", F(33, 2), "PAPER", ""),
        ("o20Bo1", F(16), "PAPER", ""),
    ]
    expected = [Expectation(f"value:mer:root:{name}", v, prov, note) for name, v, prov, note in values]
    expected.append(Expectation("choice:mer:root", ["o10Ao7", "o10T", "o20T"], "DERIVED"))
    return Scenario("p4c-counterexample", t, bel, contexts, expected, {"root": "s1"},
                    description="Composite acts hTg: h on T = {s1, s2}, g on s3; utilities u(o_k) = k.")


BUILTINS: dict[str, Callable[[], Scenario]] = {
    "procrastination": procrastination,
    "exam-table1": exam_table1,
    "exam-table1-normalized": exam_table1_normalized,
    "lost-cause": lost_cause,
    "p4c-counterexample": p4c_counterexample,
}


def builtin(name: str) -> Scenario:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; available: {sorted(BUILTINS)}") from None
    return factory()


# ---------------------------------------------------------------------- random problems

@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`generate`. Ranges are inclusive ``(low, high)`` pairs."""

    seed: int = 0
    n_states: tuple[int, int] = (2, 4)
    depth: tuple[int, int] = (1, 2)
    branching: tuple[int, int] = (2, 2)
    n_measures: tuple[int, int] = (1, 3)
    weight_grid: tuple[Fraction, ...] = (F(1, 4), F(1, 2), F(3, 4), F(1))
    utility_grid: tuple[int, ...] = tuple(range(0, 10))
    mass_denominator: int = 4
    trivial_information: bool = False
    singleton_beliefs: bool = False
    closed_under_conditioning: bool = False
    scaled_conditionals: bool = False
    two_stage: bool = False
    full_support: bool = False
    max_plans: int = 64
    max_tries: int = 50

    def __post_init__(self):
        for name in ("n_states", "depth", "branching", "n_measures"):
            lo, hi = getattr(self, name)
            if not 1 <= lo <= hi:
                raise ValueError(f"{name} must satisfy 1 <= low <= high, got {(lo, hi)}")
        if self.n_states[1] > 12:
            raise ValueError("at most 12 states")
        if self.closed_under_conditioning and self.singleton_beliefs:
            raise ValueError("closed_under_conditioning and singleton_beliefs are exclusive")
        if self.closed_under_conditioning and self.n_states[0] < 2:
            raise ValueError("closed_under_conditioning needs at least two states")
        if any(not 0 < w <= 1 for w in self.weight_grid) or F(1) not in self.weight_grid:
            raise ValueError("weight grid must lie in (0, 1] and contain 1")


def _random_measure(rng: random.Random, states, denominator: int, full_support: bool) -> ProbMeasure:
    n = len(states)
    while True:
        if full_support:
            cuts = sorted(rng.randint(1, denominator * n - 1) for _ in range(n - 1)) if denominator * n > n else []
            parts = [b - a for a, b in zip([0] + cuts, cuts + [denominator * n])]
            if any(p == 0 for p in parts):
                continue
            total = denominator * n
        else:
            parts = [rng.randint(0, denominator) for _ in range(n)]
            total = sum(parts)
            if total == 0:
                continue
        return ProbMeasure(tuple(states), tuple(F(p, total) for p in parts))


def _random_partition(rng: random.Random, block: list[str]) -> list[list[str]]:
    k = rng.randint(1, len(block))
    labels = [rng.randrange(k) for _ in block]
    parts: dict[int, list[str]] = {}
    for s, lab in zip(block, labels):
        parts.setdefault(lab, []).append(s)
    return list(parts.values())


def _beliefs(rng: random.Random, cfg: GeneratorConfig, space: StateSpace, event: frozenset | None) -> WeightedBeliefSet:
    states = space.states
    if cfg.singleton_beliefs:
        return WeightedBeliefSet.singleton(_random_measure(rng, states, cfg.mass_denominator, cfg.full_support))
    if cfg.closed_under_conditioning:
        pr = _random_measure(rng, states, cfg.mass_denominator, True)
        ev = event if event else frozenset(states[:1])
        pairs = {pr.mass: (pr, F(1))}
        for part in (ev, space.complement(ev)):
            cond = pr.condition(part)
            weight = pr.prob(part) if cfg.scaled_conditionals else F(1)
            if cond.mass not in pairs:
                pairs[cond.mass] = (cond, weight)
        return WeightedBeliefSet.of(states, pairs.values())
    k = rng.randint(*cfg.n_measures)
    measures: dict[tuple, ProbMeasure] = {}
    for _ in range(10 * k):
        if len(measures) == k:
            break
        m = _random_measure(rng, states, cfg.mass_denominator, cfg.full_support)
        measures.setdefault(m.mass, m)
    ms = list(measures.values())
    weights = [rng.choice(cfg.weight_grid) for _ in ms]
    weights[rng.randrange(len(ms))] = F(1)
    return WeightedBeliefSet.of(states, zip(ms, weights))


def _skeleton(rng: random.Random, cfg: GeneratorConfig, depth: int) -> dict[tuple[str, ...], int]:
    """Action prefixes of decision nodes (shared by every state) mapped to their action counts."""
    out: dict[tuple[str, ...], int] = {}
    queue = [()]
    while queue:
        prefix = queue.pop(0)
        b = rng.randint(*cfg.branching)
        out[prefix] = b
        for i in range(b):
            child = prefix + (f"a{i}",)
            if len(child) < depth and (i == 0 or rng.random() < 0.6):
                queue.append(child)
    return out


def _attempt(rng: random.Random, cfg: GeneratorConfig, index: int) -> Scenario | None:
    n = rng.randint(*cfg.n_states)
    states = tuple(f"s{i + 1}" for i in range(n))
    depth = 1 if cfg.two_stage else rng.randint(*cfg.depth)
    skeleton = _skeleton(rng, cfg, depth)
    # one partition per depth, each refining the previous one
    partitions = [[list(states)]]
    for _ in range(depth):
        if cfg.trivial_information or cfg.two_stage:
            partitions.append(partitions[-1])
        else:
            finer = []
            for block in partitions[-1]:
                finer.extend(_random_partition(rng, block))
            partitions.append(finer)
    leaves = {}
    isets: dict[str, list[str]] = {}
    for prefix, b in skeleton.items():
        blocks = partitions[len(prefix)]
        for k, block in enumerate(blocks):
            name = ("/".join(prefix) or "root") + (f"#{k}" if len(blocks) > 1 else "")
            isets[name] = ["/".join((s,) + prefix) for s in block]
        for i in range(b):
            kid = prefix + (f"a{i}",)
            if kid not in skeleton:
                for s in states:
                    leaves["/".join((s,) + kid)] = rng.choice(cfg.utility_grid)
    basis = []
    for d, part in enumerate(partitions):
        if len(part) > 1:
            for k, block in enumerate(part):
                basis.append((f"P{d}.{k}", frozenset(block)))
    event = None
    if cfg.closed_under_conditioning:
        if basis:
            event = basis[0][1]
        else:
            size = rng.randint(1, n - 1)
            event = frozenset(rng.sample(list(states), size))
            basis.append(("E", event))
    if cfg.two_stage:
        for j in range(rng.randint(0, 2)):
            ev = frozenset(s for s in states if rng.random() < 0.5)
            if ev and ev != frozenset(states):
                basis.append((f"B{j}", ev))
    space = StateSpace(states, tuple(basis))
    tree = DecisionTree.from_leaves(space, leaves, isets)
    if tree.plan_count() > cfg.max_plans:
        return None
    bel = _beliefs(rng, cfg, space, event)
    contexts = {
        "likelihood": ChoiceContext(DecisionRule.MWER, bel, UpdateRule.LIKELIHOOD, MenuPolicy.constant()),
        "prior": ChoiceContext(DecisionRule.MWER, bel, UpdateRule.PRIOR_BY_PRIOR, MenuPolicy.constant()),
    }
    return Scenario(f"random-{cfg.seed}-{index}", tree, bel, contexts, aliases={"root": states[0]})


def generate(cfg: GeneratorConfig) -> Scenario:
    """Deterministic random problem; retried until the plan count fits ``cfg.max_plans``."""
    rng = random.Random(cfg.seed)
    for i in range(cfg.max_tries):
        sc = _attempt(rng, cfg, i)
        if sc is not None:
            return sc
    raise ValueError(f"no problem with at most {cfg.max_plans} plans after {cfg.max_tries} tries")


def generate_many(cfg: GeneratorConfig, count: int) -> list[Scenario]:
    from dataclasses import replace

    return [generate(replace(cfg, seed=cfg.seed * 100_003 + i)) for i in range(count)]
