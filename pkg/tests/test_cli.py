from __future__ import annotations

import io
import json
from pathlib import Path

import pytest

from regretlab import problemfile
from regretlab.cli import EXIT_CAP, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def procrastination_file(tmp_path):
    path = tmp_path / "procrastination.json"
    assert run("export", "procrastination", "--context", "constant", "-o", str(path))[0] == EXIT_PASS
    return path


class TestValidate:
    def test_fixture_file_passes(self, procrastination_file):
        assert run("validate", str(procrastination_file))[0] == EXIT_PASS

    def test_overlapping_info_sets(self):
        code, out = run("validate", str(DATA / "overlapping.json"))
        assert code == EXIT_FAIL
        assert "node in two information sets" in out and "again" in out

    def test_malformed_rational(self, tmp_path, capsys):
        text = (DATA / "singleton.json").read_text().replace('"1/3"', '"0.6"')
        path = tmp_path / "bad.json"
        path.write_text(text)
        assert run("validate", str(path))[0] == EXIT_INPUT
        assert "$.beliefs[0].masses.rain" in capsys.readouterr().err

    def test_missing_file(self):
        assert run("validate", "/nonexistent/problem.json")[0] == EXIT_INPUT


class TestChoose:
    def test_root_constant(self, procrastination_file):
        code, out = run("choose", str(procrastination_file), "--at", "root", "--menu", "constant")
        assert code == EXIT_PASS
        chosen = [line for line in out.splitlines() if line.startswith("*")]
        assert chosen == ["* play-study\t15"]

    def test_play_feasible(self, procrastination_file):
        code, out = run("choose", str(procrastination_file), "--at", "play", "--menu", "feasible", "--json")
        payload = json.loads(out)
        assert payload["chosen"] == [{"act": "play-play", "value": "5"}]
        assert payload["candidates"] == [{"act": "play-play", "value": "5"}, {"act": "play-study", "value": "10"}]

    def test_p4c_root(self):
        code, out = run("choose", "builtin:p4c-counterexample", "--at", "root", "--json")
        chosen = json.loads(out)["chosen"]
        assert {c["value"] for c in chosen} == {"15"}
        assert sorted(c["act"] for c in chosen) == ["o10Ao7", "o10T", "o20T"]

    def test_all_lists_every_candidate(self):
        code, out = run("choose", "builtin:exam-table1", "--at", "hard", "--update", "prior", "--all")
        assert "9/5" in out and len(out.strip().splitlines()) == 1 + 4

    def test_unknown_history(self):
        assert run("choose", "builtin:procrastination", "--at", "hard/sleep")[0] == EXIT_INPUT

    def test_bad_flag(self):
        assert run("choose", "builtin:procrastination", "--at", "root", "--rule", "maxmin")[0] == EXIT_INPUT
        assert run("choose", "builtin:procrastination")[0] == EXIT_INPUT


class TestCheck:
    def test_exam_reversal_prior(self):
        code, out = run("check", "builtin:exam-table1", "--kind", "reversal", "--update", "prior")
        assert code == EXIT_FAIL
        assert "hard-short/play" in out

    def test_exam_reversal_likelihood(self):
        assert run("check", "builtin:exam-table1", "--kind", "reversal", "--update", "likelihood")[0] == EXIT_PASS

    def test_singleton_sep(self):
        assert run("check", str(DATA / "singleton.json"), "--kind", "sep")[0] == EXIT_PASS

    @pytest.mark.parametrize("update", ["prior", "likelihood"])
    def test_trivial_information_reversal_constant(self, update):
        code, _ = run("check", str(DATA / "trivial_info.json"), "--kind", "reversal", "--menu", "constant", "--update", update)
        assert code == EXIT_PASS

    @pytest.mark.parametrize("kind, expected", [("sep", EXIT_FAIL), ("rect", EXIT_FAIL), ("axioms", EXIT_FAIL), ("thm2", EXIT_PASS)])
    def test_exam_kinds(self, kind, expected):
        assert run("check", "builtin:exam-table1", "--kind", kind, "--update", "prior")[0] == expected

    def test_sep_needs_beliefs(self):
        assert run("check", "builtin:procrastination", "--kind", "sep")[0] == EXIT_INPUT

    def test_cap_exceeded(self, monkeypatch, capsys):
        monkeypatch.setenv("REGRETLAB_CAPS", "plans=4")
        assert run("check", "builtin:exam-table1", "--kind", "reversal")[0] == EXIT_CAP
        assert "plans" in capsys.readouterr().err

    def test_golden_report(self):
        code, out = run("check", "builtin:exam-table1", "--kind", "reversal", "--update", "prior", "--json")
        assert code == EXIT_FAIL
        assert json.loads(out) == json.loads((GOLDEN / "exam_table1_reversal_prior.json").read_text())


class TestExport:
    def test_list(self):
        code, out = run("export", "--list")
        assert out.split() == ["exam-table1", "exam-table1-normalized", "lost-cause", "p4c-counterexample", "procrastination"]

    def test_export_loads(self):
        code, out = run("export", "p4c-counterexample")
        problem = problemfile.loads(out)
        assert problem.defaults["menu_policy"] == "explicit" and len(problem.menus["*"]) == 5

    def test_unknown(self):
        assert run("export", "secretary")[0] == EXIT_INPUT
