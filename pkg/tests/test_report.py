import json
import subprocess
import sys

import numpy as np
import pytest

from hpminimal import cli
from hpminimal.checks import CheckResult
from hpminimal.report import (
    CSV_COLUMNS,
    ConfigError,
    ExitCode,
    RunConfig,
    RunResult,
    emit_report,
    run,
)


def invoke(args, tmp_path, name="out.json"):
    path = tmp_path / name
    code = cli.main(list(args) + ["--out", str(path)])
    return code, json.loads(path.read_text()), path


def test_verify_clifford_n3(tmp_path):
    code, doc, _ = invoke(["verify", "--variant", "clifford", "--n", "3"], tmp_path)
    assert code == 0 and doc["passed"]
    residuals = {c["name"]: c["max_residual"] for c in doc["checks"]}
    assert set(residuals) >= {"totally_real_hp", "minimal_hp", "horizontal", "minimal_cp"}
    for name in ("totally_real_hp", "minimal_hp", "horizontal", "totally_real_cp", "minimal_cp"):
        assert residuals[name] < 1e-8
    assert doc["config"]["n"] == 3 and "out" not in doc["config"]


def test_angle_csv(tmp_path):
    csv_path = tmp_path / "angle.csv"
    code, doc, _ = invoke(["angle", "--variant", "companion", "--n", "2", "--grid", "4x3",
                           "--csv", str(csv_path)], tmp_path)
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 12
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    assert np.max(np.abs(rows[:, 3])) < 1e-10
    np.testing.assert_allclose(rows[:, 2], 2.0, atol=1e-10)
    assert rows[1, 0] > rows[0, 0] and rows[1, 1] == rows[0, 1]  # x varies fastest


def test_scan_n1(tmp_path):
    code, doc, _ = invoke(["scan", "--n", "1", "--m", "1", "--trials", "5"], tmp_path)
    assert code == 0
    case = doc["data"]["scan"]["cases"][0]
    assert case["thetas"][1] == pytest.approx(np.pi, abs=1e-7)
    assert case["weights"] == pytest.approx([0.5, 0.5], abs=1e-7)


def test_sequence_and_gauge_commands(tmp_path):
    code, doc, _ = invoke(["sequence", "--variant", "companion", "--n", "2", "--grid", "3x3"],
                          tmp_path)
    assert code == 0 and doc["data"]["isotropy_order"]["value"] == 5
    code, doc, _ = invoke(["gauge", "--n", "1", "--grid", "3x3", "--seed", "4"], tmp_path, "g.json")
    assert code == 0 and doc["data"]["integrability_residual"] < 1e-6


def test_exponential_family_verify(tmp_path):
    code, doc, _ = invoke(["verify", "--theta", "0,1.0,2.5", "--weights", "0.2,0.3,0.5"],
                          tmp_path)
    assert code == ExitCode.CHECK_FAILURE
    assert {c["name"]: c["passed"] for c in doc["checks"]}["minimal_cp"] is False
    assert len(doc["data"]["moment"]) == 2


def test_reports_are_byte_identical(tmp_path):
    args = ["verify", "--variant", "companion", "--n", "2", "--grid", "3x3"]
    _, _, a = invoke(args, tmp_path, "a.json")
    _, _, b = invoke(args, tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_timings_flag(tmp_path):
    _, doc, _ = invoke(["verify", "--n", "1", "--grid", "3x3", "--timings"], tmp_path)
    assert doc["timings"]["total_seconds"] >= 0
    _, doc, _ = invoke(["verify", "--n", "1", "--grid", "3x3"], tmp_path, "b.json")
    assert "timings" not in doc


def test_stdout_report(capsysbinary):
    assert cli.main(["verify", "--n", "1", "--grid", "3x3"]) == 0
    assert json.loads(capsysbinary.readouterr().out)["passed"] is True


def test_empty_check_list_is_valid():
    res = RunResult(RunConfig())
    doc = json.loads(emit_report(res))
    assert doc["checks"] == [] and doc["passed"] is True


def test_float_and_complex_encoding():
    doc = {"x": 0.1, "z": 1 + 2j, "bad": float("nan"), "big": float("inf"), "arr": np.arange(2)}
    text = emit_report(doc).decode()
    assert '"x": 0.10000000000000001' in text
    parsed = json.loads(text)
    assert parsed["z"] == [1.0, 2.0] and parsed["bad"] == "nan" and parsed["arr"] == [0, 1]
    assert list(parsed) == sorted(parsed)
    with pytest.raises(TypeError):
        emit_report({"o": object()})
    with pytest.raises(ValueError):
        emit_report(doc, "xml")


def test_check_failure_exit_code(tmp_path):
    code, doc, _ = invoke(["verify", "--n", "2", "--grid", "3x3", "--tol", "1e-300"], tmp_path)
    assert code == ExitCode.CHECK_FAILURE and not doc["passed"]


@pytest.mark.parametrize("args", [
    ["verify", "--grid", "2x2"],
    ["verify", "--tol", "-1"],
    ["verify", "--theta", "0,1"],
    ["verify", "--theta", "0,1", "--weights", "0.3,0.3"],
    ["verify", "--cell", "1,0,0,1"],
    ["verify", "--variant", "clifford", "--lift-variant", "full-signed"],
    ["scan", "--n", "5"],
    ["sequence", "--depth", "0"],
    ["angle", "--theta", "0,3.14159", "--weights", "0.5,0.5"],
])
def test_config_errors(args, tmp_path):
    assert cli.main(args + ["--out", str(tmp_path / "x.json")]) == ExitCode.CONFIG_ERROR


def test_argparse_errors_use_config_exit_code():
    with pytest.raises(SystemExit) as info:
        cli.main(["verify", "--grid", "nine"])
    assert info.value.code == ExitCode.CONFIG_ERROR
    with pytest.raises(SystemExit) as info:
        cli.main(["frobnicate"])
    assert info.value.code == ExitCode.CONFIG_ERROR


def test_csv_without_table(tmp_path):
    cfg = RunConfig(command="scan", n=1, m=1, trials=2, csv=str(tmp_path / "t.csv"))
    with pytest.raises(ConfigError):
        run(cfg)


def test_internal_error_exit_code(monkeypatch, capsys):
    def boom(cfg):
        raise RuntimeError("boom")

    monkeypatch.setattr(cli, "run", boom)
    assert cli.main(["verify"]) == ExitCode.INTERNAL_ERROR
    assert "boom" in capsys.readouterr().err


def test_check_result_round_trip_in_report():
    res = RunResult(RunConfig(), checks=[CheckResult("a", 1e-12, 1e-10, (0.5, 0.25))])
    doc = json.loads(emit_report(res))
    assert doc["checks"][0]["worst_point"] == [0.5, 0.25] and doc["checks"][0]["passed"]


def test_module_entry_point(tmp_path):
    out = tmp_path / "m.json"
    proc = subprocess.run([sys.executable, "-m", "hpminimal", "verify", "--n", "1", "--grid", "3x3",
                           "--out", str(out)], capture_output=True)
    assert proc.returncode == 0 and json.loads(out.read_text())["passed"]
