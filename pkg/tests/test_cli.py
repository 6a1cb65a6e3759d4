import json
import subprocess
import sys

import pytest

from opf.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


def test_families_table(capsys):
    code, rows = run_json(capsys, "families")
    assert code == 0 and len(rows) == 8
    code, rows = run_json(capsys, "families", "--family", "hermite")
    assert rows == [{"id": "hermite", "rho": "1", "tau": "-2x", "lambda_rule": "2n",
                     "params": {}, "interval": ["-inf", "inf"]}]


def test_verify_invariant_hermite(capsys):
    code, out = run_json(capsys, "verify-invariant", "--family", "hermite", "--n", "3", "--mu", "1")
    assert code == 0 and out["exact"] is True and out["cofactor"] == "v+2x"


def test_verify_invariant_failure_exits_one(capsys):
    code, out = run_json(capsys, "verify-invariant", "--jacobi-shape", "--lambda", "2", "--mu", "1",
                         "--f", "x+2")
    assert code == 1 and out["exact"] is False and out["remainder"] == "-3"


@pytest.mark.parametrize("argv", [
    ("system", "--family", "hermite", "--n", "0", "--mu", "0"),
    ("system", "--family", "hermite", "--system-json", "x.json", "--n", "1", "--mu", "1"),
    ("system", "--family", "hermite", "--n", "1"),
    ("system", "--family", "jacobi", "--alpha", "-2", "--n", "1", "--mu", "1"),
    ("system", "--family", "hermite", "--alpha", "1", "--n", "1", "--mu", "1"),
    ("system", "--jacobi-shape", "--lambda", "-1", "--mu", "1"),
    ("system", "--mu", "1/0"),
    ("darboux", "--jacobi-shape", "--lambda", "2", "--mu", "1", "--s", "0"),
    ("portrait", "--jacobi-shape", "--lambda", "2", "--mu", "1", "--tol", "5"),
    ("selftest", "--inject-fault", "A9"),
    ("nonsense",),
    (),
])
def test_usage_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err


def test_system_json_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "system", "--family", "jacobi", "--alpha", "1/2", "--beta", "1",
                       "--n", "3", "--mu", "-2/3")
    assert code == 0
    path = tmp_path / "s.json"
    path.write_text(out)
    code, again, _ = run(capsys, "system", "--system-json", str(path))
    assert json.loads(again) == json.loads(out)
    code, pts = run_json(capsys, "critical-points", "--system-json", str(path))
    assert code == 0 and all("kind" in p for p in pts)


def test_user_system_json(capsys, tmp_path):
    path = tmp_path / "user.json"
    path.write_text(json.dumps({"P": "v^2 - x", "Q": "v - x + 2"}))
    code, pts = run_json(capsys, "critical-points", "--system-json", str(path))
    assert code == 0
    assert sorted(tuple(p["location"]) for p in pts) == [("-1", "1"), ("2", "4")]
    path.write_text("{not json")
    code, _, err = run(capsys, "system", "--system-json", str(path))
    assert code == 2


def test_darboux_certificate(capsys):
    code, out = run_json(capsys, "darboux", "--jacobi-shape", "--a", "0", "--b", "0",
                         "--lambda", "2", "--mu", "1", "--s", "1")
    assert code == 0
    assert out["lambdas"] == ["-1/2", "1/2"]
    assert out["invariant"] == "sqrt(x-1)/sqrt(x+1)*exp(t)"
    assert out["flow_check"]["max_drift"] < 1e-6


def test_darboux_infeasible_exits_one(capsys, tmp_path):
    # the only line x = 0 has cofactor x, so l*x = -1 has no solution
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"P": "v", "Q": "x^2"}))
    code, out = run_json(capsys, "darboux", "--system-json", str(path), "--no-flow")
    assert code == 1 and out["feasible"] is False


def test_darboux_rejects_non_invariant_curve(capsys):
    code, out = run_json(capsys, "darboux", "--jacobi-shape", "--lambda", "2", "--mu", "1",
                         "--curve", "x+3", "--no-flow")
    assert code == 1 and "not invariant" in out["error"]


def test_critical_points_with_infinity(capsys):
    code, pts = run_json(capsys, "critical-points", "--jacobi-shape", "--lambda", "2", "--mu", "1",
                         "--a", "1", "--include-infinity")
    charts = [p["chart"] for p in pts]
    assert charts.count("finite") == 4 and charts.count("U1") == 2 and charts.count("U2") == 1
    assert all("direction" in p for p in pts if p["chart"] != "finite")


def test_series_order_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("OPF_SERIES_ORDER", "9")
    code, pts = run_json(capsys, "critical-points", "--jacobi-shape", "--lambda", "2", "--mu", "1",
                         "--a", "0")
    assert code == 0 and {p["evidence"]["order"] for p in pts} == {9}
    monkeypatch.setenv("OPF_SERIES_ORDER", "x")
    code, _, _ = run(capsys, "critical-points", "--jacobi-shape", "--lambda", "2", "--mu", "1", "--a", "0")
    assert code == 2


def test_portrait_outputs(capsys, tmp_path):
    svg, table, man = tmp_path / "p.svg", tmp_path / "p.csv", tmp_path / "m.json"
    code, out, _ = run(capsys, "portrait", "--jacobi-shape", "--lambda", "2", "--mu", "1", "--a", "1",
                       "--grid", "3", "--horizon", "2", "--svg", str(svg), "--csv", str(table),
                       "-o", str(man))
    assert code == 0
    assert json.loads(out)["glyphs"] == 10
    assert svg.exists() and table.read_text().startswith("trajectory_id,t,v,x")
    assert json.loads(man.read_text())["files"]["svg"] == str(svg)


def test_chebyshev_integral(capsys):
    code, out = run_json(capsys, "chebyshev-integral", "--n", "2", "--mu", "1", "--check-flow")
    assert code == 0
    assert out["exact_residual_T"] is True
    assert out["reduced_numerator"] == ["-18", "0", "15"]
    assert out["drift_v"] < 1e-6 and out["drift_w"] < 1e-6
    assert out["bridge_roundtrip_err"] < 1e-12


def test_chebyshev_integral_pole_start_is_a_failure(capsys):
    # U1 = 2x vanishes at x = 0, a pole of the w-form's U'/U term
    code, _, err = run(capsys, "chebyshev-integral", "--n", "2", "--check-flow", "--start", "0.2,0")
    assert code == 1 and "PoleAtPoint" in err


def test_output_file(capsys, tmp_path):
    out = tmp_path / "fam.json"
    code, _, _ = run(capsys, "families", "-o", str(out))
    assert code == 0 and len(json.loads(out.read_text())) == 8


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "opf", "system", "--family", "hermite", "--n", "0",
                          "--mu", "0"], capture_output=True, text=True)
    assert res.returncode == 2 and "mu must be nonzero" in res.stderr
