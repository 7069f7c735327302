from __future__ import annotations

import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from radial_pdirichlet.cli import main


def run(args, capsys):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_p1(tmp_path, capsys):
    code, out, _ = run(["solve", "--r", 2, "--R", 2, "--p", 1, "--out", tmp_path], capsys)
    assert code == 0
    assert (tmp_path / "profile.csv").read_text().startswith("t,H,dH,g,P\n")
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["param"] == pytest.approx(1.0851, abs=1e-4)
    assert abs(rep["gap"]) < 1e-9


def test_solve_nonexistence(tmp_path, capsys):
    code, out, err = run(["solve", "--r", 2, "--R", 4, "--p", 1, "--out", tmp_path], capsys)
    assert code == 2
    assert "2.84965" in out and "2.84965" in err
    assert not (tmp_path / "profile.csv").exists()


def test_solve_power_map_json(tmp_path, capsys):
    code, _, _ = run(["solve", "--r", 2, "--R", 4, "--p", 2, "--out", tmp_path, "--format", "json"], capsys)
    assert code == 0
    prof = json.loads((tmp_path / "profile.json").read_text())
    np.testing.assert_allclose(prof["H"], np.array(prof["t"]) ** 2, rtol=1e-14)


def test_solve_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["solve", "--r", 2, "--R", 2, "--p", 1.5, "--out", d], capsys)[0] == 0
    for name in ("profile.csv", "report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


@pytest.mark.parametrize("r,expected,tol", [(2, 2.84965, 1e-5), (1e6, 4.81048, 1e-4), (1.0001, 1.0142, 1e-4)])
def test_threshold(r, expected, tol, capsys):
    code, out, _ = run(["threshold", "--r", r], capsys)
    assert code == 0
    R0 = float(re.search(r"R0 (\S+)", out).group(1))
    logR0 = float(re.search(r"log_R0 (\S+)", out).group(1))
    assert abs(R0 - expected) < tol
    assert logR0 == pytest.approx(math.pi / 2 - math.atan(1 / math.sqrt(r * r - 1)), rel=1e-14)


def test_threshold_rejects_domain(capsys):
    code, _, err = run(["threshold", "--r", 1], capsys)
    assert code == 1 and "--r" in err


def test_validation_is_aggregated(capsys):
    code, _, err = run(["solve", "--r", 0.5, "--p", 3, "--nt", 4], capsys)
    assert code == 1
    assert "--r" in err and "--R" in err and "--p" in err and "--nt" in err
    assert err.count("error:") == 1


def test_unknown_command_exit_code(capsys):
    assert run(["launch"], capsys)[0] == 1
    assert run(["solve", "--bogus", 1], capsys)[0] == 1


def test_energy_grid(capsys):
    code, out, _ = run(["energy", "--r", 2, "--R", 2, "--p", 1.5, "--nt", 64, "--ntheta", 64], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["nt"] == 64 and 0 < rep["gap"] < 1e-3 * rep["energy"]


def test_energy_from_map_file(tmp_path, capsys):
    from radial_pdirichlet.geometry import polar_grid, sample_radial

    t, _ = polar_grid(1.0, 2.0, 32, 32)
    sample_radial(lambda x: x, t, 32).to_csv(tmp_path / "map.csv")
    code, out, _ = run(["energy", "--r", 2, "--R", 2, "--p", 2, "--map", tmp_path / "map.csv"], capsys)
    assert code == 0
    # the identity has energy 4 pi log 2, above the minimum 2 pi (1 + 1) log 2 only through discretization
    assert json.loads(out)["energy"] == pytest.approx(4 * math.pi * math.log(2), rel=1e-3)


@pytest.mark.parametrize("R,p,check", [(2, 1, lambda d: d > 0.05), (2, 2, lambda d: d <= 1e-10),
                                       (4, 2, lambda d: d == pytest.approx(2.0, abs=1e-12))])
def test_plot(tmp_path, capsys, R, p, check):
    code, _, _ = run(["plot", "--r", 2, "--R", R, "--p", p, "--out", tmp_path], capsys)
    assert code == 0
    svg = (tmp_path / "profile.svg").read_text()
    dev = float(re.search(r'max_deviation="([^"]+)"', svg).group(1))
    assert check(dev)
    assert svg.startswith("<svg") and "<metadata>" in svg


def test_sweep_outputs(tmp_path, capsys):
    code, _, _ = run(["sweep", "--out", tmp_path, "--nodes", 200], capsys)
    assert code == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(rows) == 43
    code, _, _ = run(["sweep", "--out", tmp_path, "--nodes", 200, "--format", "json"], capsys)
    data = json.loads((tmp_path / "sweep.json").read_text())
    assert max(abs(d["gap"]) / d["energy"] for d in data) < 1e-6


def test_verify_deterministic(tmp_path, capsys):
    args = ["verify", "--r", 2, "--R", 2, "--p", 1.5, "--trials", 6, "--nt", 32, "--ntheta", 32, "--seed", 42]
    for d in ("a", "b"):
        assert run(args + ["--out", tmp_path / d], capsys)[0] == 0
    for name in ("verify.json", "trials.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    trials = json.loads((tmp_path / "a" / "trials.json").read_text())
    assert {"seed", "mode", "amplitude", "energy", "gap"} <= set(trials[0])


def test_verify_injection_names_invariant(tmp_path, capsys):
    code, _, err = run(["verify", "--r", 2, "--R", 2, "--p", 1.5, "--trials", 0, "--inject", "g-offset",
                        "--out", tmp_path], capsys)
    assert code == 1
    assert "p-constancy" in err


def test_console_script_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "radial_pdirichlet.cli", "threshold", "--r", "2"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 0 and "R0 2.84965" in proc.stdout
