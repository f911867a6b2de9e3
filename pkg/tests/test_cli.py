"""End-to-end CLI checks through real subprocesses (exit codes, CSV, JSON)."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "stablepow.cli"]


def run(*args, **kw):
    return subprocess.run(CMD + list(args), capture_output=True, text=True, **kw)


def test_version_flag():
    out = run("--version")
    assert out.returncode == 0
    assert out.stdout.strip() == "stablepow-0.1.0"


def test_frontier_csv_flat_zone():
    out = run("frontier", "--alpha-min", "0.2", "--alpha-max", "0.4", "--steps", "3")
    assert out.returncode == 0
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "alpha,R,R_tilde,R_hat,lower,upper,tol,status"
    assert len(lines) == 4
    row = lines[1].split(",")
    assert float(row[0]) == 0.2
    assert float(row[1]) == float(row[2]) == float(row[3]) == 0.2
    assert row[-1] == "ok"
    # determinism: a rerun is byte-identical
    again = run("frontier", "--alpha-min", "0.2", "--alpha-max", "0.4", "--steps", "3")
    assert again.stdout == out.stdout


def test_frontier_output_file(tmp_path):
    path = tmp_path / "front.csv"
    out = run("frontier", "--alpha-min", "0.3", "--alpha-max", "0.3", "--steps", "1",
              "-o", str(path))
    assert out.returncode == 0
    text = path.read_text(encoding="utf-8")
    assert text.startswith("alpha,R,R_tilde,R_hat,lower,upper,tol,status\n")
    assert ",ok" in text


def test_frontier_usage_error():
    out = run("frontier", "--alpha-min", "0.6", "--alpha-max", "0.4", "--steps", "3")
    assert out.returncode == 2
    assert "usage error" in out.stderr


def test_modes_grid():
    out = run("modes", "--alpha-min", "0.4", "--alpha-max", "0.9",
              "--alpha-steps", "2", "--r-min", "-1.0", "--r-max", "1.0", "--r-steps", "2")
    assert out.returncode == 0
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "alpha,r,boundary_class,interior_maxima,verdict,status"
    assert len(lines) == 5
    cells = {tuple(l.split(",")[:2]): l.split(",") for l in lines[1:]}
    assert cells[("0.40000000000000002", "-1")][4] == "monotone"
    assert cells[("0.90000000000000002", "-1")][4] == "not_unimodal"
    assert all(row[-1] == "ok" for row in cells.values())


def test_modes_rejects_zero_power():
    out = run("modes", "--alpha-min", "0.4", "--alpha-max", "0.9",
              "--alpha-steps", "2", "--r-min", "-1.0", "--r-max", "1.0", "--r-steps", "3")
    assert out.returncode == 2
    assert "usage error" in out.stderr


def test_density_csv():
    out = run("density", "--alpha", "0.5", "--x-min", "0.5", "--x-max", "2.0",
              "--points", "4", "--spacing", "lin")
    assert out.returncode == 0
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "x,f,f_prime,est_error,branch"
    assert len(lines) == 5
    x, f, fp, err, branch = lines[1].split(",")
    # Levy closed form at x = 0.5
    import math
    ref = math.exp(-1.0 / (4 * 0.5)) / (2 * math.sqrt(math.pi) * 0.5**1.5)
    assert float(f) == pytest.approx(ref, rel=1e-12)
    assert branch in ("series", "integral")
    assert float(err) < 1e-10


def test_density_power_mode():
    out = run("density", "--alpha", "0.4", "--power", "-0.4", "--x-min", "0.1",
              "--x-max", "5.0", "--points", "6")
    assert out.returncode == 0
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "x,density"
    assert len(lines) == 7
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert all(v > 0 for v in vals)


def test_cm_check_witness_path():
    out = run("cm-check", "--alpha", "3/4", "--t", "4/3", "--max-order", "5")
    assert out.returncode == 1  # a witness was found
    rep = json.loads(out.stdout)
    assert rep["passed"] is False
    assert rep["first_failing_order"] == 5
    assert rep["witness_value"].startswith("-")
    # the same check capped at order 4 passes
    ok = run("cm-check", "--alpha", "3/4", "--t", "4/3", "--max-order", "4")
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["passed"] is True


def test_cm_check_bad_rational():
    out = run("cm-check", "--alpha", "0.75x", "--t", "1")
    assert out.returncode == 2


def test_verify_identities_deterministic():
    a = run("verify-identities", "--seed", "42", "--n", "4000")
    b = run("verify-identities", "--seed", "42", "--n", "4000")
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout
    rep = json.loads(a.stdout)
    assert rep["config"] == {"n": 4000, "seed": 42}
    assert rep["passed"] is True
    assert set(rep["gates"]) == {
        "additive_alpha_0.4_r_0.5",
        "cm_check_3_4",
        "kanter_certificates",
        "laplace_mc_alpha_0.2",
        "laplace_mc_alpha_0.5",
        "laplace_mc_alpha_0.8",
        "laplace_quadrature",
        "multiplicative_alpha_0.3_r_0.3",
    }
    assert all(g["passed"] for g in rep["gates"].values())


def test_selftest_battery():
    out = run("selftest")
    assert out.returncode == 0, out.stdout + out.stderr
    lines = out.stdout.strip().splitlines()
    assert sum(1 for l in lines if l.startswith("ok ")) == 10
    assert not any(l.startswith("FAIL") for l in lines)
