"""CLI surface: flags, exit codes, report formats, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from maptree.cli import main

TOY = "0 1 1\n1 0 0\n0 0 0\n1 1 1\n"


@pytest.fixture
def toy_path(tmp_path):
    path = tmp_path / "toy.txt"
    path.write_text(TOY)
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestFit:
    def test_defaults_solve_the_toy(self, capsys, toy_path, tmp_path):
        out = tmp_path / "tree.json"
        code, stdout, _ = run_cli(capsys, "fit", toy_path, "--out", str(out))
        assert code == 0
        report = json.loads(stdout)
        assert report["optimal"] is True
        assert set(report) == {"neg_log_joint", "optimal", "expansions_used", "elapsed_ms", "n_nodes"}
        doc = json.loads(out.read_text())
        assert doc["format"] == "maptree-tree-v1"
        assert doc["n_features"] == 2

    def test_budget_one_is_anytime(self, capsys, toy_path):
        code, stdout, _ = run_cli(capsys, "fit", toy_path, "--max-expansions", "1")
        assert code == 0
        report = json.loads(stdout)
        assert report["optimal"] is False
        assert report["expansions_used"] == 1
        assert report["n_nodes"] == 1  # best-after-one-expansion is the leaf

    def test_require_optimal_exit_codes(self, capsys, toy_path):
        code, _, _ = run_cli(capsys, "fit", toy_path, "--require-optimal")
        assert code == 0
        code, _, _ = run_cli(
            capsys, "fit", toy_path, "--require-optimal", "--max-expansions", "1"
        )
        assert code == 2

    def test_missing_file(self, capsys, tmp_path):
        code, _, stderr = run_cli(capsys, "fit", str(tmp_path / "absent.txt"))
        assert code == 1
        assert "error:" in stderr

    def test_hyperparameter_flags_change_the_posterior(self, capsys, toy_path):
        _, out_a, _ = run_cli(capsys, "fit", toy_path)
        _, out_b, _ = run_cli(capsys, "fit", toy_path, "--alpha", "0.2", "--beta", "4.0")
        a = json.loads(out_a)["neg_log_joint"]
        b = json.loads(out_b)["neg_log_joint"]
        assert a != b


class TestPredictEval:
    def test_predict_lines(self, capsys, toy_path, tmp_path):
        out = tmp_path / "tree.json"
        run_cli(capsys, "fit", toy_path, "--out", str(out))
        code, stdout, _ = run_cli(capsys, "predict", str(out), toy_path)
        assert code == 0
        lines = stdout.strip().splitlines()
        assert len(lines) == 4
        for line in lines:
            prob, label = line.split()
            assert 0.0 < float(prob) < 1.0
            assert label in ("0", "1")

    def test_predict_feature_mismatch(self, capsys, toy_path, tmp_path):
        other = tmp_path / "other.txt"
        other.write_text("0 1 0 1\n1 0 1 0\n")
        out = tmp_path / "tree.json"
        run_cli(capsys, "fit", toy_path, "--out", str(out))
        code, _, stderr = run_cli(capsys, "predict", str(out), str(other))
        assert code == 1
        assert "features" in stderr

    def test_eval_report(self, capsys, toy_path, tmp_path):
        out = tmp_path / "tree.json"
        run_cli(capsys, "fit", toy_path, "--out", str(out))
        code, stdout, _ = run_cli(capsys, "eval", toy_path, "--tree", str(out))
        assert code == 0
        metrics = json.loads(stdout)
        assert metrics["accuracy"] == 1.0
        assert metrics["n_nodes"] >= 1

    def test_eval_needs_tree_or_cv(self, capsys, toy_path):
        code, _, stderr = run_cli(capsys, "eval", toy_path)
        assert code == 1

    def test_eval_cv(self, capsys, tmp_path):
        rng = np.random.default_rng(0)
        rows = []
        for _ in range(20):
            bits = rng.integers(0, 2, size=3)
            rows.append(" ".join(str(b) for b in bits) + f" {bits[0]}")
        path = tmp_path / "cv.txt"
        path.write_text("\n".join(rows) + "\n")
        code, stdout, _ = run_cli(capsys, "eval", str(path), "--cv", "4")
        assert code == 0
        metrics = json.loads(stdout)
        assert metrics["cv"] == 4
        assert 0.0 <= metrics["accuracy"] <= 1.0


class TestSynth:
    def test_fixed_seed_reproduces_files(self, capsys, tmp_path):
        args = [
            "synth",
            "--n-features", "6",
            "--n-internal-nodes", "3",
            "--n-samples", "50",
            "--noise-eps", "0.1",
            "--seed", "9",
        ]
        a_data, a_tree = tmp_path / "a.txt", tmp_path / "a.json"
        b_data, b_tree = tmp_path / "b.txt", tmp_path / "b.json"
        run_cli(capsys, *args, "--out", str(a_data), "--tree-out", str(a_tree))
        run_cli(capsys, *args, "--out", str(b_data), "--tree-out", str(b_tree))
        assert a_data.read_bytes() == b_data.read_bytes()
        assert a_tree.read_bytes() == b_tree.read_bytes()

    def test_output_loads_and_fits(self, capsys, tmp_path):
        data = tmp_path / "synth.txt"
        code, stdout, _ = run_cli(
            capsys, "synth", "--n-features", "4", "--n-internal-nodes", "2",
            "--n-samples", "30", "--seed", "1", "--out", str(data),
        )
        assert code == 0
        report = json.loads(stdout)
        assert report["n_samples"] == 30
        code, stdout, _ = run_cli(capsys, "fit", str(data), "--max-expansions", "50")
        assert code == 0


class TestEnumerate:
    def test_single_sample_emits_one_line(self, capsys, tmp_path):
        path = tmp_path / "one.txt"
        path.write_text("0 1 1\n")
        code, stdout, _ = run_cli(capsys, "enumerate", str(path))
        assert code == 0
        lines = stdout.strip().splitlines()
        assert len(lines) == 1
        record = json.loads(lines[0])
        assert set(record) == {"tree", "log_prior", "log_joint"}
        assert record["log_prior"] == 0.0

    def test_guard_flag(self, capsys, tmp_path):
        rng = np.random.default_rng(1)
        rows = ["{} {} {}".format(*rng.integers(0, 2, size=3)) for _ in range(12)]
        path = tmp_path / "big.txt"
        path.write_text("\n".join(rows) + "\n")
        code, _, stderr = run_cli(capsys, "enumerate", str(path))
        assert code == 1
        assert "guard" in stderr
        code, stdout, _ = run_cli(capsys, "enumerate", str(path), "--guard-samples", "12")
        assert code == 0


class TestBench:
    def test_csv_shape_and_stability_after_solve(self, capsys, toy_path):
        code, stdout, _ = run_cli(capsys, "bench", toy_path, "--budgets", "1,3,10,30")
        assert code == 0
        lines = stdout.strip().splitlines()
        assert lines[0] == "budget,elapsed_ms,neg_log_joint,optimal"
        rows = [line.split(",") for line in lines[1:]]
        assert [r[0] for r in rows] == ["1", "3", "10", "30"]
        # once solved, later rungs repeat the same cost with optimal=true
        solved = [r for r in rows if r[3] == "true"]
        assert solved
        assert len({r[2] for r in solved}) == 1
        costs = [float(r[2]) for r in rows]
        assert all(a >= b for a, b in zip(costs, costs[1:]))


class TestConsoleScript:
    def test_installed_entry_point(self, toy_path):
        proc = subprocess.run(
            [sys.executable, "-m", "maptree.cli", "fit", toy_path],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["optimal"] is True
