"""Byte-exact golden tests for every CLI command.

Regenerate after an intentional output change with:
    PLKIT_REGOLD=1 python -m pytest tests/test_cli.py
then review the diff under tests/golden/ before committing it.
"""

import os

import pytest
from conftest import GOLDEN, fixture_path

from plkit.cli import main

CASES = [
    ("validate_press", ["validate", fixture_path("press.fm")], 0),
    ("validate_cycle", ["validate", fixture_path("cycle.fm")], 1),
    ("validate_unsat", ["validate", fixture_path("unsat.fm")], 1),
    ("validate_contra", ["validate", fixture_path("contra.fm")], 1),
    ("validate_isolated", ["validate", fixture_path("isolated.fm")], 1),
    ("validate_badcard", ["validate", fixture_path("badcard.fm")], 1),
    ("validate_falseopt", ["validate", fixture_path("falseopt.fm")], 0),
    ("validate_deadfeat", ["validate", fixture_path("deadfeat.fm")], 0),
    ("solve_first", ["solve", fixture_path("press.fm"), "--first"], 0),
    ("solve_count", ["solve", fixture_path("press.fm"), "--count"], 0),
    ("solve_all", ["solve", fixture_path("press.fm"), "--all"], 0),
    ("solve_select_b", ["solve", fixture_path("press.fm"), "--select", "B", "--all"], 0),
    ("solve_limit", ["solve", fixture_path("press.fm"), "--limit", "2"], 0),
    ("solve_exclude_c", ["solve", fixture_path("press.fm"), "--exclude", "C", "--all"], 0),
    ("solve_unsat", ["solve", fixture_path("unsat.fm"), "--first"], 2),
    ("solve_conflict", ["solve", fixture_path("press.fm"),
                        "--select", "D", "--select", "E", "--first"], 2),
    ("optimize_min", ["optimize", fixture_path("press.fm"), "--attr", "cost", "--min"], 0),
    ("optimize_min_b", ["optimize", fixture_path("press.fm"), "--attr", "cost", "--min",
                        "--select", "B"], 0),
    ("optimize_bound", ["optimize", fixture_path("press.fm"), "--attr", "cost", "--min",
                        "--bound", "cost<=0"], 2),
    ("consequences_e", ["consequences", fixture_path("press.fm"), "--select", "E"], 0),
    ("consequences_empty", ["consequences", fixture_path("press.fm")], 0),
    ("consequences_conflict", ["consequences", fixture_path("press.fm"),
                               "--select", "D", "--select", "E"], 2),
    ("compile_press", ["compile", fixture_path("press.fm")], 0),
    ("match_press", ["match", fixture_path("press_match.fm"),
                     "--reqs", fixture_path("reqs.txt"),
                     "--lexicon", fixture_path("lexicon.lex")], 0),
    ("match_defaults", ["match", fixture_path("press_match.fm"),
                        "--reqs", fixture_path("reqs.txt")], 0),
]

REGOLD = os.environ.get("PLKIT_REGOLD") == "1"


@pytest.mark.parametrize("name,argv,expected_exit", CASES, ids=[c[0] for c in CASES])
def test_golden(name, argv, expected_exit, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    out_path = GOLDEN / f"{name}.out"
    err_path = GOLDEN / f"{name}.err"
    if REGOLD:
        out_path.write_text(captured.out, encoding="utf-8")
        if captured.err:
            err_path.write_text(captured.err, encoding="utf-8")
        elif err_path.exists():
            err_path.unlink()
        return
    assert code == expected_exit
    assert captured.out == out_path.read_text(encoding="utf-8")
    expected_err = err_path.read_text(encoding="utf-8") if err_path.exists() else ""
    assert captured.err == expected_err


class TestUsageErrors:
    def test_unknown_feature_exit_3(self, capsys):
        assert main(["solve", fixture_path("press.fm"), "--select", "Z", "--first"]) == 3
        assert "unknown feature" in capsys.readouterr().err

    def test_unreadable_file_exit_4(self, capsys):
        assert main(["solve", "/nonexistent/model.fm", "--first"]) == 4

    def test_bad_flag_exit_3(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["solve", fixture_path("press.fm"), "--bogus"])
        assert err.value.code == 3

    def test_invalid_model_exit_1(self, capsys, tmp_path):
        bad = tmp_path / "bad.fm"
        bad.write_text("root R\nmandatory R R\n")
        assert main(["solve", str(bad), "--first"]) == 1

    def test_bad_bound_exit_3(self, capsys):
        assert main(["optimize", fixture_path("press.fm"), "--attr", "cost",
                     "--min", "--bound", "cost!5"]) == 3
