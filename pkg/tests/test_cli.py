"""End-to-end CLI behavior: subcommands, files, exit codes."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from irl1.cli import EXIT_CODES, main
from irl1.instances import instance_from_json
from irl1.solver import SolveStatus


@pytest.fixture()
def tiny_instance(tmp_path):
    out = tmp_path / "instances"
    rc = main(
        [
            "gen",
            "--m", "4", "--n", "8", "--k", "2",
            "--seed", "3",
            "--out", str(out),
        ]
    )
    assert rc == 0
    return out / "instance_3.json"


class TestGen:
    def test_writes_loadable_instance(self, tiny_instance):
        inst = instance_from_json(tiny_instance.read_text())
        assert inst.A.shape == (4, 8)
        assert np.count_nonzero(inst.x_true) == 2

    def test_profile_and_count(self, tmp_path):
        rc = main(
            ["gen", "--m", "4", "--n", "6", "--k", "1", "--count", "2",
             "--seed", "10", "--out", str(tmp_path)]
        )
        assert rc == 0
        assert (tmp_path / "instance_10.json").exists()
        assert (tmp_path / "instance_11.json").exists()

    def test_requires_shape_or_profile(self, tmp_path, capsys):
        rc = main(["gen", "--m", "4", "--out", str(tmp_path)])
        assert rc == 1
        assert "provide --profile" in capsys.readouterr().err


class TestSolve:
    def test_converged_run_exits_zero_and_writes_result(self, tiny_instance, tmp_path):
        out = tmp_path / "run"
        trace = tmp_path / "trace.csv"
        rc = main(
            ["solve", str(tiny_instance), "--out", str(out), "--trace", str(trace)]
        )
        assert rc == 0
        doc = json.loads((out / "result.json").read_text())
        assert doc["status"] == "Converged"
        assert doc["nnz"] == len([v for v in doc["final_x"] if v != 0.0])
        lines = trace.read_text().splitlines()
        assert lines[0] == "k,F,F_eps,residual,nnz,gamma,ls_trials"
        assert len(lines) == doc["iterations"] + 2

    def test_budget_exhaustion_exits_two(self, tiny_instance, tmp_path):
        rc = main(
            ["solve", str(tiny_instance), "--max-iter", "1", "--out", str(tmp_path)]
        )
        assert rc == 2

    def test_malformed_input_exits_one(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        rc = main(["solve", str(bad), "--out", str(tmp_path)])
        assert rc == 1
        assert "cannot read instance" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path):
        rc = main(["solve", str(tmp_path / "nope.json"), "--out", str(tmp_path)])
        assert rc == 1

    def test_line_search_failure_maps_to_three(self):
        assert EXIT_CODES[SolveStatus.LINE_SEARCH_FAILURE] == 3
        assert EXIT_CODES[SolveStatus.MAX_ITERATIONS] == 2
        assert EXIT_CODES[SolveStatus.CONVERGED] == 0


class TestExperiment:
    def test_small_batch_writes_all_reports(self, tmp_path, capsys):
        rc = main(
            [
                "experiment",
                "--profile", "small",
                "--count", "2",
                "--base-seed", "500",
                "--strategies", "sr",
                "--eps0-list", "1.0",
                "--jobs", "1",
                "--out", str(tmp_path),
            ]
        )
        assert rc == 0
        for name in ("report.csv", "summary.json", "histogram.csv", "success_curve.csv"):
            assert (tmp_path / name).exists()
        report = (tmp_path / "report.csv").read_text().splitlines()
        assert len(report) == 3
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["count"] == 2
        assert "strategy=sr" in capsys.readouterr().out

    def test_unknown_strategy_exits_one(self, tmp_path, capsys):
        rc = main(
            ["experiment", "--count", "1", "--strategies", "bogus",
             "--out", str(tmp_path)]
        )
        assert rc == 1
        assert "invalid configuration" in capsys.readouterr().err


class TestContour:
    def test_tiny_grid_and_certificate(self, tmp_path):
        rc = main(["contour", "--resolution", "5", "--out", str(tmp_path)])
        assert rc == 0
        for name in ("contour.csv", "contour_l1.csv"):
            lines = (tmp_path / name).read_text().splitlines()
            assert lines[0] == "x,y,f_lp,f_wl1"
            assert len(lines) == 1 + 25
        cert = json.loads((tmp_path / "certificate.json").read_text())
        assert set(cert) == {"support", "w", "b", "kkt_violation"}
        assert cert["support"] == [1]
        # inactive weight: margin 2 times |grad_1 f| / lam = 2 * 1 / 0.1
        assert cert["w"]["0"] == pytest.approx(20.0)
        assert cert["kkt_violation"] <= 1e-10

    def test_minimal_resolution_is_schema_valid(self, tmp_path):
        rc = main(["contour", "--resolution", "2", "--out", str(tmp_path)])
        assert rc == 0
        lines = (tmp_path / "contour.csv").read_text().splitlines()
        assert len(lines) == 1 + 4

    def test_malformed_range_exits_one(self, tmp_path, capsys):
        rc = main(["contour", "--target", "1,2,3", "--out", str(tmp_path)])
        assert rc == 1
        assert "invalid configuration" in capsys.readouterr().err


class TestEnvironment:
    def test_default_out_env_var(self, tmp_path, monkeypatch):
        target = tmp_path / "from_env"
        monkeypatch.setenv("IRL1_DEFAULT_OUT", str(target))
        rc = main(["gen", "--m", "4", "--n", "6", "--k", "1", "--seed", "0"])
        assert rc == 0
        assert (target / "instance_0.json").exists()

    def test_console_entry_point(self, tmp_path):
        env = dict(os.environ, IRL1_DEFAULT_OUT=str(tmp_path))
        proc = subprocess.run(
            [sys.executable, "-m", "irl1.cli", "gen", "--m", "4", "--n", "6",
             "--k", "1", "--seed", "1"],
            capture_output=True,
            text=True,
            env=env,
        )
        assert proc.returncode == 0
        assert (tmp_path / "instance_1.json").exists()
