import json
import re
from pathlib import Path

import pytest

from linspect.cli import main
from linspect.fixtures import ALL_PLAIN, ALL_POINTED, write_fixture_files
from linspect.games import solve_bisim
from linspect.structures import load_structure, structure_from_dict
from linspect.traces import check_trace_relation

REPO = Path(__file__).resolve().parents[1]
FIXDIR = REPO / "fixtures"


def fx(name: str) -> str:
    return str(FIXDIR / f"{name}.json")


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestFixtureFiles:
    def test_shipped_files_match_builders(self, tmp_path):
        fresh = write_fixture_files(str(tmp_path))
        for path in fresh:
            name = Path(path).stem
            shipped = (FIXDIR / f"{name}.json").read_text()
            assert shipped == Path(path).read_text(), name

    def test_all_fixtures_parse(self):
        for name in list(ALL_POINTED) + list(ALL_PLAIN):
            s, _ = load_structure(fx(name))
            assert s.universe


class TestCheck:
    def test_cltr_true(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--rel", "cltr", "-k", "3", fx("fix1"), fx("fix2"))
        assert code == 0 and out.startswith("TRUE")

    def test_bisim_false_with_spoiler_line(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--rel", "bisim", "-k", "2", fx("fix1"), fx("fix2"))
        assert code == 1
        assert out.startswith("FALSE")
        assert "spoiler" in out

    def test_exact_cltr_witness(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--rel", "cltr", "--exact", fx("fix3"), fx("fix4"))
        assert code == 1
        assert "{} -a-> {} !" in out

    def test_parse_error_exit_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"universe": []}')
        code, _, err = run_cli(capsys, "check", "--rel", "tr", "-k", "1", str(bad), fx("fix1"))
        assert code == 2
        assert "error:" in err

    def test_missing_point_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "check", "--rel", "tr", "-k", "1", fx("chain2"), fx("fix1"))
        assert code == 2


class TestDistinguish:
    def test_deadlock_pair(self, capsys):
        code, out, _ = run_cli(capsys, "distinguish", "--fragment", "bot", "-k", "2", fx("fix3"), fx("fix4"))
        assert code == 1
        assert out.strip() == "(dia a (deadlock))"

    def test_equivalent(self, capsys):
        code, out, _ = run_cli(capsys, "distinguish", "--fragment", "bot", "-k", "3", fx("fix1"), fx("fix1"))
        assert code == 0 and out.strip() == "equivalent"

    def test_graded(self, capsys):
        code, out, _ = run_cli(capsys, "distinguish", "--fragment", "graded", "-k", "1", fx("fix2"), fx("fix1"))
        assert code == 1
        assert out.strip() == "(gdia >= 2 a tt)"


class TestUnravel:
    def test_ml_fix4(self, capsys):
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "ML", "-k", "2", fx("fix4"))
        assert code == 0
        data = json.loads(out)
        # one budget-exhausting run: a single 3-node chain
        assert len(data["universe"]) == 3
        s, point, forest = structure_from_dict(data)
        assert point is not None and forest is not None

    def test_pr_loop(self, capsys):
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "PR", "-k", "1", "--len", "2", fx("loop"))
        data = json.loads(out)
        roots = data["forest"]["roots"]
        assert len(roots) == 2
        depths = sorted(len(data["universe"]) - len(roots) + 1 for _ in [0])
        assert len(data["universe"]) == 3  # chains of length 1 and 2

    def test_graft_loop(self, capsys):
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "GRAFT", "-k", "1", fx("loop"))
        data = json.loads(out)
        assert len(data["universe"]) == 2

    def test_tree(self, capsys):
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "TREE", "-k", "2", fx("fix2"))
        assert len(json.loads(out)["universe"]) == 5


class TestGameAndEval:
    def test_ef_chains(self, capsys):
        code, out, _ = run_cli(capsys, "game", "--type", "ef", "-r", "2", fx("chain2"), fx("chain3"))
        assert code == 1 and out.strip() == "SPOILER"
        code, out, _ = run_cli(capsys, "game", "--type", "ef", "-r", "1", fx("chain2"), fx("chain3"))
        assert code == 0 and out.strip() == "DUPLICATOR"

    def test_ppeb(self, capsys):
        code, out, _ = run_cli(capsys, "game", "--type", "ppeb", "-k", "2", "--len", "2", fx("chain2"), fx("chain3"))
        assert out.strip() in ("DUPLICATOR", "SPOILER")

    def test_bisim(self, capsys):
        code, out, _ = run_cli(capsys, "game", "--type", "bisim", "-k", "2", fx("fix1"), fx("fix2"))
        assert code == 1 and out.strip() == "SPOILER"

    def test_bf_on_unravel_output(self, capsys, tmp_path):
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "ML", "-k", "3", fx("fix1"))
        (tmp_path / "a.json").write_text(out)
        code, out, _ = run_cli(capsys, "unravel", "--comonad", "ML", "-k", "3", fx("fix2"))
        (tmp_path / "b.json").write_text(out)
        code, out, _ = run_cli(
            capsys, "game", "--type", "bf", str(tmp_path / "a.json"), str(tmp_path / "b.json")
        )
        assert code == 0 and out.strip() == "DUPLICATOR"

    def test_eval(self, capsys, tmp_path):
        terminal = tmp_path / "terminal.json"
        terminal.write_text(
            json.dumps(
                {
                    "signature": {"modal": True, "relations": [{"name": "a", "arity": 2}]},
                    "universe": ["t"],
                    "point": "t",
                    "interp": {"a": []},
                }
            )
        )
        code, out, _ = run_cli(capsys, "eval", "--formula", "(deadlock)", str(terminal))
        assert code == 0 and out.strip() == "TRUE"
        code, out, _ = run_cli(capsys, "eval", "--formula", "(deadlock)", fx("fix4"))
        assert code == 1 and out.strip() == "FALSE"

    def test_eval_formula_file(self, capsys, tmp_path):
        ff = tmp_path / "f.sexp"
        ff.write_text("(dia a (dia b (deadlock)))")
        code, out, _ = run_cli(capsys, "eval", "--formula-file", str(ff), fx("fix4"))
        assert code == 0


class TestVerify:
    def test_report_shape_and_exit(self, capsys):
        code, out, _ = run_cli(
            capsys, "verify", "--suite", "prop85", "--size", "3", "-k", "2",
            "--samples", "10", "--seed", "7",
        )
        assert code == 0
        assert out.splitlines()[0] == "SUITE prop85 SAMPLES 10 AGREE 10 FAIL 0"

    def test_unknown_suite_is_cli_error(self, capsys):
        with pytest.raises(SystemExit):
            main(["verify", "--suite", "nope"])


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv",
        [
            ("check", "--rel", "cltr", "-k", "3", "fix1", "fix2"),
            ("distinguish", "--fragment", "graded", "-k", "2", "fix2", "fix1"),
            ("unravel", "--comonad", "ML", "-k", "3", "fix2"),
            ("verify", "--suite", "prop84", "--size", "3", "-k", "2", "--samples", "5", "--seed", "3"),
        ],
    )
    def test_byte_identical_reruns(self, capsys, argv):
        argv = [a if not a.startswith("fix") else fx(a) for a in argv]
        _, first, _ = run_cli(capsys, *argv)
        _, second, _ = run_cli(capsys, *argv)
        assert first == second


class TestReadmeGoldenTable:
    def test_verdict_table_matches_implementation(self):
        readme = (REPO / "README.md").read_text()
        block = re.search(r"\| left \| right \|.*?\n\n", readme, re.S)
        assert block, "README must carry the fixture verdict table"
        rows = [
            line.strip().strip("|").split("|")
            for line in block.group(0).strip().splitlines()[2:]
        ]
        from linspect.fixtures import ALL_POINTED

        k = 3
        assert len(rows) == 12
        for cells in rows:
            la, lb, *verdicts = [c.strip() for c in cells]
            a, b = ALL_POINTED[la](), ALL_POINTED[lb]()
            expected = []
            for rel in ("tr", "ltr", "cltr", "gltr", "rt"):
                expected.append("T" if check_trace_relation(rel, a, b, k).holds else "F")
            expected.append("T" if solve_bisim(a, b, k).duplicator_wins else "F")
            assert verdicts == expected, (la, lb)


class TestErrorPaths:
    def test_signature_mismatch_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "check", "--rel", "tr", "-k", "2", fx("fix4"), fx("fix5"))
        assert code == 2 and "error:" in err

    def test_exact_mode_rejected_for_gltr(self, capsys):
        code, _, err = run_cli(capsys, "check", "--rel", "gltr", "--exact", fx("fix1"), fx("fix2"))
        assert code == 2 and "exact" in err

    def test_bad_formula_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--formula", "(dia a", fx("fix4"))
        assert code == 2

    def test_unknown_action_exit_two(self, capsys):
        code, _, err = run_cli(capsys, "eval", "--formula", "(dia zz tt)", fx("fix4"))
        assert code == 2

    def test_scripts_run(self, capsys):
        import subprocess, sys

        out = subprocess.run(
            [sys.executable, str(REPO / "scripts" / "spectrum_report.py"),
             fx("fix3"), fx("fix4"), "--max-k", "2"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert "cltr" in out.stdout
        out = subprocess.run(
            [sys.executable, str(REPO / "scripts" / "chain_replay.py"),
             fx("fix1"), fx("fix2"), "--rank", "1", "--formula", "(dia a tt)"],
            capture_output=True, text=True,
        )
        assert out.returncode == 0
        assert "constant across stations: True" in out.stdout


class TestReadyTraceCommand:
    def test_rt_detects_ready_set_mismatch(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--rel", "rt", "-k", "2", fx("fix1"), fx("fix2"))
        assert code == 1
        assert out.startswith("FALSE")
        assert "{" in out

    def test_rt_reflexive(self, capsys):
        code, out, _ = run_cli(capsys, "check", "--rel", "rt", "-k", "3", fx("fix1"), fx("fix1"))
        assert code == 0 and out.startswith("TRUE")
