"""Structured verdicts returned by every checker, with text and JSON renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

SCHEMA = "regretlab/check-report"
SCHEMA_VERSION = 1


def to_jsonable(value: Any) -> Any:
    """Convert witness payloads (fractions, events, plans, ...) to plain JSON values."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (frozenset, set)):
        return sorted(to_jsonable(v) for v in value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if hasattr(value, "to_jsonable"):
        return value.to_jsonable()
    return str(value)


@dataclass
class CheckReport:
    """Verdict of a consistency or validity check.

    ``witnesses`` hold structured counterexamples; a failing report always
    carries at least one. ``components`` records sub-verdicts (for example
    the four axioms, or parts a/b/c of rectangularity).
    """

    check: str
    passed: bool
    witnesses: list[dict] = field(default_factory=list)
    stats: dict[str, Any] = field(default_factory=dict)
    components: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.passed and not self.witnesses:
            raise ValueError(f"{self.check}: a failing report needs at least one witness")

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "version": SCHEMA_VERSION,
            "check": self.check,
            "verdict": self.verdict,
            "components": {k: ("pass" if v else "fail") for k, v in self.components.items()},
            "stats": to_jsonable(self.stats),
            "witnesses": to_jsonable(self.witnesses),
            "notes": list(self.notes),
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=False)

    def format_text(self, max_witnesses: int = 5) -> str:
        lines = [f"{self.check}: {self.verdict.upper()}"]
        for name, ok in self.components.items():
            lines.append(f"  {name}: {'pass' if ok else 'fail'}")
        if self.stats:
            stats = ", ".join(f"{k}={to_jsonable(v)}" for k, v in self.stats.items())
            lines.append(f"  stats: {stats}")
        for note in self.notes:
            lines.append(f"  note: {note}")
        for w in self.witnesses[:max_witnesses]:
            lines.append("  witness: " + json.dumps(to_jsonable(w), sort_keys=False))
        if len(self.witnesses) > max_witnesses:
            lines.append(f"  ... {len(self.witnesses) - max_witnesses} more witnesses")
        return "\n".join(lines)


def merge_reports(check: str, reports: list[CheckReport], max_witnesses: int | None = None) -> CheckReport:
    """Combine cell reports in order; the merged report fails if any part fails."""
    witnesses: list[dict] = []
    stats: dict[str, Any] = {}
    components: dict[str, bool] = {}
    notes: list[str] = []
    for r in reports:
        witnesses.extend(r.witnesses)
        for k, v in r.stats.items():
            if isinstance(v, int) and not isinstance(v, bool):
                stats[k] = stats.get(k, 0) + v
        for k, v in r.components.items():
            components[k] = components.get(k, True) and v
        for n in r.notes:
            if n not in notes:
                notes.append(n)
    if max_witnesses is not None:
        witnesses = witnesses[:max_witnesses]
    passed = all(r.passed for r in reports)
    return CheckReport(check, passed, witnesses, stats, components, notes)
