from __future__ import annotations

import json
import math

import pytest

from src.cli import EXIT_INVALID, EXIT_NO_CROSSING, EXIT_OK, main
from src.report import AUDIT_CSV_HEADER
from src.sweep import CSV_HEADER


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("GME_CACHE_PATH", "GME_WORKERS", "GME_LOG_LEVEL", "GME_AUDIT_CHUNK"):
        monkeypatch.delenv(name, raising=False)


def _machine(capsys):
    return json.loads(capsys.readouterr().out)


def test_evaluate_pure_ghz_qubit(capsys):
    assert main(["evaluate", "--state", "ghz", "--d", "2", "--format", "machine"]) == EXIT_OK
    out = _machine(capsys)
    assert out["criterion"] == "pt-qubit"
    assert out["value"] == pytest.approx(2.0, abs=1e-12)
    assert out["threshold"] == pytest.approx(math.sqrt(3.0))
    assert out["verdict"] == "GME_DETECTED"


def test_evaluate_noise_weight(capsys):
    assert main(["evaluate", "--d", "2", "--noise-weight", "0.5", "--format", "machine"]) == EXIT_OK
    assert _machine(capsys)["value"] == pytest.approx(1.0, abs=1e-12)


def test_evaluate_qutrit_white_noise_end(capsys):
    assert main(["evaluate", "--d", "3", "--visibility", "0", "--format", "machine"]) == EXIT_OK
    out = _machine(capsys)
    assert out["criterion"] == "ct-qudit"
    assert out["value"] == pytest.approx(1.0, abs=1e-12)
    assert out["verdict"] == "INCONCLUSIVE"


def test_evaluate_text_report(capsys):
    assert main(["evaluate", "--d", "2"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("GME criterion report")
    assert "GME_DETECTED" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["evaluate", "--d", "1"],
        ["evaluate", "--state", "cluster"],
        ["evaluate", "--visibility", "1.5"],
        ["evaluate", "--d", "2", "--criterion", "ct-qudit"],
        ["scan", "--grid", "0:1:1"],
        ["audit", "--samples", "-3"],
    ],
)
def test_invalid_input_exits_2(argv):
    assert main(argv) == EXIT_INVALID


def test_usage_errors_exit_2(capsys):
    assert main(["evaluate", "--noise-weight", "0.1", "--visibility", "0.9"]) == 2
    assert main(["audit", "--cache", "x.sqlite", "--no-cache"]) == 2
    assert main(["bogus"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_missing_input_file_exits_2(tmp_path):
    assert main(["evaluate", "--input", str(tmp_path / "absent.json")]) == EXIT_INVALID


def test_crossover_without_sign_change_exits_3(capsys):
    assert main(["crossover", "--state", "white-noise", "--d", "2"]) == EXIT_NO_CROSSING
    assert capsys.readouterr().out == ""


def test_crossover_in_noise_weight(capsys):
    argv = ["crossover", "--d", "2", "--sweep", "noise-weight", "--format", "machine"]
    assert main(argv) == EXIT_OK
    out = _machine(capsys)
    assert out["value"] == pytest.approx((2.0 - math.sqrt(3.0)) / 2.0, abs=1e-6)
    assert out["mode"] is None


def test_scan_writes_csv(tmp_path, capsys):
    path = tmp_path / "scan.csv"
    argv = ["scan", "--d", "2", "--grid", "0:1:5", "--sweep", "noise-weight", "--csv", str(path)]
    assert main(argv) == EXIT_OK
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 6
    assert "Sweep of pt-qubit over noise-weight" in capsys.readouterr().out


def test_audit_reuses_cache(tmp_path, capsys):
    cache = tmp_path / "audit.sqlite"
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["audit", "--d", "2", "--samples", "20", "--seed", "4", "--cache", str(cache)]
    assert main(base + ["--csv", str(first)]) == EXIT_OK
    assert main(base + ["--csv", str(second), "--verbose"]) == EXIT_OK
    err = capsys.readouterr().err
    assert "Reusing cached audit" in err
    assert first.read_text(encoding="utf-8") == second.read_text(encoding="utf-8")
    assert first.read_text(encoding="utf-8").splitlines()[0] == ",".join(AUDIT_CSV_HEADER)


def test_audit_machine_output(capsys):
    assert main(["audit", "--samples", "5", "--no-cache", "--format", "machine"]) == EXIT_OK
    out = _machine(capsys)
    assert out["exceeds_bound"] is True
    assert out["rows"][0]["label"] == "probe:bell-pair"


def test_gen_then_evaluate_input(tmp_path, capsys):
    path = tmp_path / "ghz3.json"
    assert main(["gen", "--state", "ghz", "--d", "3", "--visibility", "0.9", "--out", str(path)]) == EXIT_OK
    assert main(["evaluate", "--input", str(path), "--format", "machine"]) == EXIT_OK
    from_file = _machine(capsys)
    assert main(["evaluate", "--d", "3", "--visibility", "0.9", "--format", "machine"]) == EXIT_OK
    direct = _machine(capsys)
    assert from_file["value"] == pytest.approx(direct["value"], abs=1e-12)
    assert main(["evaluate", "--input", str(path), "--d", "2"]) == EXIT_INVALID


def test_out_flag_writes_file(tmp_path, capsys):
    out = tmp_path / "report.csv"
    assert main(["evaluate", "--d", "2", "--format", "csv", "--out", str(out)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    header = out.read_text(encoding="utf-8").splitlines()[0]
    assert header.startswith("criterion,mode,d,norm_1|23")
