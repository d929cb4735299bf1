"""Regret-based choice under ambiguity in dynamic decision problems.

Exact (``Fraction``) evaluation of minimax regret, MER and MWER over
weighted sets of probability measures, prior-by-prior and likelihood
updating, decision trees with information sets, and checkers for
preference reversals, separability, rectangularity and the choice axioms.
"""

from .beliefs import (
    ProbMeasure,
    StateSpace,
    UpdateRule,
    WeightedBeliefSet,
    WeightedMeasure,
    c_generators,
    in_c,
    in_convex_c,
    sigma_algebra,
    update,
    upper_expectation,
    upper_weighted_prob,
)
from .caps import CapExceeded, Caps
from .consistency import (
    ChoiceContext,
    Instance,
    check_axioms,
    check_axioms_menu,
    check_no_reversal,
    check_rectangularity,
    check_sep,
    check_sep_all,
    choice_at,
    cross_validate_thm2,
)
from .regret import (
    Act,
    DecisionRule,
    Menu,
    RegretChoice,
    choice,
    expected_regret,
    max_regret,
    mer,
    mwer,
    rule_value,
    state_regret,
)
from .report import CheckReport
from .scenarios import GeneratorConfig, Scenario, builtin, generate
from .tree import DecisionTree, History, MenuPolicy, Plan, menu_at, validate

__all__ = [
    "Act",
    "builtin",
    "c_generators",
    "CapExceeded",
    "Caps",
    "check_axioms",
    "check_axioms_menu",
    "check_no_reversal",
    "check_rectangularity",
    "check_sep",
    "check_sep_all",
    "CheckReport",
    "choice",
    "choice_at",
    "ChoiceContext",
    "cross_validate_thm2",
    "DecisionRule",
    "DecisionTree",
    "expected_regret",
    "generate",
    "GeneratorConfig",
    "History",
    "in_c",
    "in_convex_c",
    "Instance",
    "max_regret",
    "Menu",
    "menu_at",
    "MenuPolicy",
    "mer",
    "mwer",
    "Plan",
    "ProbMeasure",
    "RegretChoice",
    "rule_value",
    "Scenario",
    "sigma_algebra",
    "state_regret",
    "StateSpace",
    "update",
    "UpdateRule",
    "upper_expectation",
    "upper_weighted_prob",
    "validate",
    "WeightedBeliefSet",
    "WeightedMeasure",
]

__version__ = "0.1.0"
