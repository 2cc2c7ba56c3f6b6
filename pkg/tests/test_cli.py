import csv
import json
import math
import subprocess
import sys

import pytest

PI4 = repr(math.pi / 4)
PI2 = repr(math.pi / 2)


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "mercerlab", *args],
        capture_output=True,
        text=True,
        timeout=300,
    )


class TestVerify:
    def test_clean_run_exit_zero(self):
        proc = run_cli(
            "verify", "--function", "exp", "--chain", "classic",
            "--trials", "20", "--seed", "7",
        )
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["summary"]["violations"] == []
        assert report["config"]["function"] == "exp"

    def test_violations_exit_two(self):
        proc = run_cli(
            "verify", "--function", "sin", "--chain", "classic", "--force",
            "--m", PI4, "--M", PI2, "--trials", "20", "--seed", "7",
        )
        assert proc.returncode == 2, proc.stderr
        report = json.loads(proc.stdout)
        assert report["summary"]["violations"]

    def test_unforced_nonconvex_is_config_error(self):
        proc = run_cli(
            "verify", "--function", "sin", "--chain", "classic",
            "--m", PI4, "--M", PI2, "--trials", "5",
        )
        assert proc.returncode == 1
        assert "force" in proc.stderr

    def test_unknown_function_is_usage_error(self):
        proc = run_cli("verify", "--function", "sinh", "--trials", "1")
        assert proc.returncode == 1

    def test_bad_flag_is_usage_error(self):
        proc = run_cli("verify", "--chain", "diagonal")
        assert proc.returncode == 1

    def test_csv_summary_written(self, tmp_path):
        path = tmp_path / "rows.csv"
        proc = run_cli(
            "verify", "--function", "exp", "--chain", "twice-diff",
            "--trials", "10", "--seed", "3", "--csv", str(path),
        )
        assert proc.returncode == 0, proc.stderr
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 10
        assert {"seed", "trial", "function", "chain", "min_gap"} <= set(rows[0])

    def test_stdout_is_pure_json_and_timing_on_stderr(self):
        proc = run_cli("verify", "--function", "exp", "--trials", "5")
        json.loads(proc.stdout)  # must parse as a single document
        assert "wall_time_s=" in proc.stderr


class TestReproduce:
    def test_sine_case(self):
        proc = run_cli("reproduce", "example-2.2")
        assert proc.returncode == 0
        values = json.loads(proc.stdout)["values"]
        assert values["lhs"] == pytest.approx(0.923880, abs=1e-6)
        assert values["rhs_classic"] == pytest.approx(0.853553, abs=1e-6)

    def test_power_gap_case(self):
        proc = run_cli("reproduce", "example-3.5")
        assert proc.returncode == 0
        gaps = json.loads(proc.stdout)["gaps"]
        assert gaps["-0.2"] == pytest.approx(-0.0052909, abs=1e-6)

    def test_function_override(self):
        proc = run_cli("reproduce", "example-2.2", "--function", "pow:p=2")
        values = json.loads(proc.stdout)["values"]
        assert values["refined_upper"] == pytest.approx(values["lhs"], abs=1e-9)

    def test_unknown_case_is_usage_error(self):
        proc = run_cli("reproduce", "example-7.1")
        assert proc.returncode == 1


class TestSearch:
    def test_sine_witness_exit_two(self):
        proc = run_cli(
            "search", "classic-nonconvex", "--function", "sin",
            "--m", PI4, "--M", PI2, "--budget", "2",
        )
        assert proc.returncode == 2
        findings = json.loads(proc.stdout)
        assert findings["status"] == "found"
        assert findings["witness"]["gap"] < -0.07

    def test_exhausted_budget_exit_zero(self):
        proc = run_cli("search", "classic-nonconvex", "--function", "exp", "--budget", "2")
        assert proc.returncode == 0
        findings = json.loads(proc.stdout)
        assert findings["status"] == "budget-exhausted"
        assert "best" in findings

    def test_probe_table_csv(self, tmp_path):
        path = tmp_path / "probe.csv"
        proc = run_cli("search", "th3-th4-order", "--budget", "2", "--csv", str(path))
        assert proc.returncode == 2
        with open(path, newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert {"t", "p", "gap", "sign"} <= set(rows[0])
        signs = {row["sign"] for row in rows}
        assert {"-1", "1"} <= signs


class TestSweep:
    def test_log_id_sweep(self):
        proc = run_cli("sweep", "--phi", "log", "--psi", "id", "--trials", "20", "--seed", "5")
        assert proc.returncode == 0, proc.stderr
        report = json.loads(proc.stdout)
        assert report["checks"]["mean_order"]["violations"] == []

    def test_missing_psi_is_usage_error(self):
        proc = run_cli("sweep", "--phi", "log")
        assert proc.returncode == 1


class TestDeterminism:
    def test_verify_byte_identical(self):
        args = (
            "verify", "--function", "exp", "--chain", "chain",
            "--trials", "25", "--seed", "123", "--vary-dims",
        )
        first = run_cli(*args)
        second = run_cli(*args)
        assert first.returncode == second.returncode == 0
        assert first.stdout.encode() == second.stdout.encode()
