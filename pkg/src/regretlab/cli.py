"""Command-line entry point: ``regretlab {validate,choose,check,export}``.

Exit codes: 0 pass, 1 check failed, 2 unreadable input or bad arguments,
3 an enumeration cap was exceeded. ``FILE`` may be ``builtin:<name>`` to
use a shipped scenario instead of a problem file.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import problemfile
from .caps import CapExceeded, Caps
from .consistency import (
    Instance,
    check_axioms,
    check_no_reversal,
    check_rectangularity,
    check_sep_all,
    choice_at,
    cross_validate_thm2,
    initial_menu,
    problem_algebra,
)
from .report import CheckReport
from .scenarios import BUILTINS, builtin
from .tree import validate

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


def _load(spec: str) -> problemfile.Problem:
    if spec.startswith("builtin:"):
        return problemfile.from_scenario(builtin(spec.split(":", 1)[1]))
    return problemfile.load(spec)


def _emit(report: CheckReport, as_json: bool, out) -> int:
    if as_json:
        out.write(report.to_json() + "\n")
    else:
        out.write(report.format_text() + "\n")
    return EXIT_PASS if report.passed else EXIT_FAIL


def cmd_validate(args, out) -> int:
    problem = _load(args.file)
    return _emit(validate(problem.tree), args.json, out)


def cmd_choose(args, out) -> int:
    problem = _load(args.file)
    ctx = problem.context(args.rule, args.update, args.menu)
    h = problem.history(args.at)
    at = choice_at(problem.tree, ctx, h)
    rows = sorted(((a.label, at.value(a), at.is_chosen(a)) for a in at.candidates), key=lambda r: (r[1], r[0]))
    if args.json:
        payload = {"history": str(h), "possible_states": problem.tree.space.sort_event(at.event), **ctx.describe(),
                   "chosen": [{"act": label, "value": str(v)} for label, v, c in rows if c],
                   "candidates": [{"act": label, "value": str(v)} for label, v, _ in rows]}
        out.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_PASS
    out.write(f"history {h}  possible states {{{', '.join(problem.tree.space.sort_event(at.event))}}}  "
              f"rule {ctx.rule.value}  update {ctx.update.value}  menu {ctx.menu_policy.name}\n")
    for label, v, chosen in rows:
        if chosen or args.all:
            out.write(f"{'*' if chosen else ' '} {label}\t{v}\n")
    return EXIT_PASS


def _need_beliefs(problem, kind):
    if problem.beliefs is None:
        raise ValueError(f"--kind {kind} needs beliefs in the problem file")
    return problem.beliefs


def cmd_check(args, out) -> int:
    problem = _load(args.file)
    caps = Caps.from_env()
    ctx = problem.context(args.rule, args.update, args.menu)
    t = problem.tree
    if args.kind == "reversal":
        report = check_no_reversal(t, ctx, caps)
    elif args.kind == "axioms":
        report = check_axioms(t, ctx, caps, seed=args.seed)
    else:
        bel = _need_beliefs(problem, args.kind)
        algebra = problem_algebra(t, caps)
        if args.kind == "sep":
            report = check_sep_all(bel, initial_menu(t, ctx, caps), algebra, ctx.update)
        elif args.kind == "rect":
            report = check_rectangularity(bel, algebra, ctx.update, seed=args.seed)
        else:
            inst = Instance(problem.name or args.file, bel, initial_menu(t, ctx, caps), algebra)
            report = cross_validate_thm2([inst], ctx.update, caps)
    return _emit(report, args.json, out)


def cmd_export(args, out) -> int:
    if args.list or not args.name:
        for name in sorted(BUILTINS):
            out.write(name + "\n")
        return EXIT_PASS
    scenario = builtin(args.name)
    problem = problemfile.from_scenario(scenario, args.context)
    text = problemfile.dumps(problem) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="regretlab", description="Regret-based choice in dynamic decision problems.")
    sub = parser.add_subparsers(dest="command", required=True)

    def ctx_flags(p):
        p.add_argument("--rule", help="minimax-regret, mer, mwer or expected-regret-single")
        p.add_argument("--update", help="prior (prior-by-prior) or likelihood")
        p.add_argument("--menu", help="constant, feasible or explicit")

    p = sub.add_parser("validate", help="check tree well-formedness and perfect recall")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("choose", help="print the choice set at a history")
    p.add_argument("file")
    p.add_argument("--at", required=True, help="history 'state/action/...' or an alias from the file")
    ctx_flags(p)
    p.add_argument("--all", action="store_true", help="also list acts that are not chosen")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_choose)

    p = sub.add_parser("check", help="run a consistency check")
    p.add_argument("file")
    p.add_argument("--kind", required=True, choices=["reversal", "sep", "rect", "axioms", "thm2"])
    ctx_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("export", help="write a built-in scenario as a problem file")
    p.add_argument("name", nargs="?")
    p.add_argument("--context", help="which scenario context supplies the defaults")
    p.add_argument("-o", "--output")
    p.add_argument("--list", action="store_true")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except CapExceeded as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CAP
    except problemfile.ProblemError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (OSError, KeyError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
