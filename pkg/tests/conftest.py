"""Shared fixtures; also prints the acceptance summary at the end of the run."""

from __future__ import annotations

import pytest

ACCEPTANCE_RESULTS: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[number] = f"CRITERION {number}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[number])


@pytest.fixture
def two_states():
    return ("s1", "s2")
