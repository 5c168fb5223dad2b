"""CLI contract tests: exit codes, output schemas, reproducibility."""

import json
import subprocess
import sys

import pytest

from qdmoment.cli import main


def run_cli(argv):
    return main(argv)


def test_usage_error_exit_2():
    proc = subprocess.run(
        [sys.executable, "-m", "qdmoment.cli", "nonsense"],
        capture_output=True)
    assert proc.returncode == 2


def test_unknown_flag_exit_2():
    proc = subprocess.run(
        [sys.executable, "-m", "qdmoment.cli", "lvalue", "--d", "5",
         "--bogus"], capture_output=True)
    assert proc.returncode == 2


def test_lvalue_json(tmp_path, capsys):
    out = tmp_path / "v.json"
    rc = run_cli(["lvalue", "--d", "5", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["value"]["re"] == pytest.approx(0.9724888505993087,
                                                   abs=1e-9)


def test_euler_json(tmp_path):
    out = tmp_path / "e.json"
    rc = run_cli(["euler", "--which", "P", "--s", "0.5", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["value"]["re"] == pytest.approx(0.8453306, abs=1e-6)
    assert payload["tail_bound"] < 1e-10


def test_check_fe_pass_and_exit_codes(tmp_path):
    out = tmp_path / "fe.json"
    rc = run_cli(["check-fe", "--kind", "nonprimitive", "--s", "-0.5",
                  "--modulus", "45", "--out", str(out)])
    assert rc == 0
    assert json.loads(out.read_text())["pass"] is True
    # an absurd tolerance forces exit 1
    rc = run_cli(["check-fe", "--kind", "nonprimitive", "--s", "-0.5",
                  "--modulus", "45", "--tolerance", "1e-30",
                  "--out", str(out)])
    assert rc == 1


def test_moment_csv_schema_and_reproducibility(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli(["moment", "--X", "2000", "--workers", "1",
                    "--out", str(a)]) == 0
    assert run_cli(["moment", "--X", "2000", "--workers", "2",
                    "--out", str(b)]) == 0
    la = a.read_text().strip().split("\n")
    lb = b.read_text().strip().split("\n")
    assert la[1].startswith("# weight=")
    assert la[2].split(",")[:3] == ["X", "s_re", "s_im"]
    # identical apart from the timestamp header and the timing column
    assert la[1] == lb[1] and la[2] == lb[2]
    va, vb = la[3].split(","), lb[3].split(",")
    assert va[:-1] == vb[:-1]


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("workers=1\n")
    out = tmp_path / "v.json"
    rc = run_cli(["--config", str(cfg), "lvalue", "--d", "1",
                  "--out", str(out)])
    assert rc == 0


def test_selftest_subset(capsys):
    rc = run_cli(["selftest", "--criteria", "11", "--workers", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "criterion 11" in out and "PASS" in out
