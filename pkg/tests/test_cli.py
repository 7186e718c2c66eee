import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nonlocal_lp import io
from nonlocal_lp.cli import main


def write_config(tmp_path, **extra):
    raw = {"kernel": {"family": "stable", "alpha": 0.5},
           "grid": {"d": 1, "n": 128, "box": 20 * np.pi}}
    raw.update(extra)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(raw))
    return str(path)


def test_kernel_check_stable(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["kernel-check", "--config", cfg, "--out", str(out)]) == 0
    certs = {c["hypothesis"]: c for c in io.read_json(out / "certificates.json")}
    assert certs["H1"]["verdict"] == "pass"
    assert certs["H1"]["constants"]["kappa1"] == pytest.approx(1.0, rel=1e-6)
    assert certs["H1"]["constants"]["alpha0"] == pytest.approx(0.5, abs=1e-6)
    assert certs["H2"]["verdict"] == "pass"
    assert certs["H2"]["constants"]["kappa2"] == pytest.approx(4.0, rel=1e-4)


def test_kernel_check_exit_status_encodes_failure(tmp_path):
    cfg = write_config(tmp_path, kernel={"family": "exp_tail"},
                       kernel_check={"hypotheses": ["H2"]})
    assert main(["kernel-check", "--config", cfg, "--out", str(tmp_path / "o")]) == 1


def test_solve_single_mode(tmp_path):
    # frequency 1, alpha = 0.5, lambda = 1: m - lambda = -2
    cfg = write_config(tmp_path, solve={"lambdas": [1.0], "f": {"profile": "cos",
                                                                  "frequency": 1.0}})
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    f = io.read_grid(out / "f.json")
    u = io.read_grid(out / "u_spectral_0.json")
    assert np.allclose(u.values, -f.values / 2, atol=1e-13)
    diag = io.read_json(out / "solve.json")
    assert diag["solutions"][0]["verdict"] == "pass"


def test_solve_from_grid_file(tmp_path):
    out = tmp_path / "first"
    cfg = write_config(tmp_path, solve={"f": {"profile": "bumps", "seed": 2}})
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    cfg2 = write_config(tmp_path, solve={"f": {"profile": "file", "path": str(out / "f.json")},
                                         "methods": ["spectral", "semigroup"]})
    assert main(["solve", "--config", cfg2, "--out", str(tmp_path / "second")]) == 0
    a = io.read_grid(out / "u_spectral_0.json")
    b = io.read_grid(tmp_path / "second" / "u_semigroup_0.json")
    assert np.allclose(a.values, b.values, atol=1e-12)


def test_solve_rejects_off_lattice_frequency(tmp_path, capsys):
    cfg = write_config(tmp_path, solve={"f": {"profile": "cos", "frequency": 0.123}})
    assert main(["solve", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "solve.f.frequency" in capsys.readouterr().err


def test_symbol_dump_columns(tmp_path):
    cfg = write_config(tmp_path, grid={"d": 2, "n": 8, "box": 8.0})
    out = tmp_path / "out"
    assert main(["symbol-dump", "--config", cfg, "--out", str(out)]) == 0
    lines = (out / "symbol.csv").read_text().splitlines()
    assert lines[0].startswith("#")
    rows = list(csv.reader(lines[1:]))
    assert rows[0] == ["xi_1", "xi_2", "re", "im"]
    assert len(rows) == 1 + 64
    vals = np.array(rows[1:], dtype=float)
    assert np.allclose(vals[:, 2], -np.hypot(vals[:, 0], vals[:, 1]) ** 0.5, atol=1e-10)


def test_verify_resolvent_bound(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert main(["verify", "--config", cfg, "--out", str(out),
                 "--suite", "resolvent-bound"]) == 0
    rep = io.read_json(out / "resolvent-bound.json")
    assert rep["verdict"] == "pass" and rep["worst_ratio"] <= 1.05
    header = (out / "resolvent-bound.csv").read_text().splitlines()[1]
    assert "ratio" in header.split(",")


def test_verify_is_byte_deterministic(tmp_path):
    cfg = write_config(tmp_path, verify={"suites": ["L2"], "options": {"L2": {"trials": 3}}})
    for name in ("a", "b"):
        assert main(["verify", "--config", cfg, "--out", str(tmp_path / name),
                     "--grid-n", "64", "--seed", "11"]) == 0
    assert (tmp_path / "a" / "L2.json").read_bytes() == (tmp_path / "b" / "L2.json").read_bytes()
    assert io.read_json(tmp_path / "a" / "L2.json")["ensemble"]["grid"]["n"] == 64


def test_verify_unknown_option(tmp_path, capsys):
    cfg = write_config(tmp_path, verify={"suites": ["L2"], "options": {"L2": {"bogus": 1}}})
    assert main(["verify", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "verify.options.L2.bogus" in capsys.readouterr().err


def test_missing_certificate_names_hypothesis(tmp_path, capsys):
    cfg = write_config(tmp_path, kernel={"family": "stable", "alpha": 1.0},
                       coefficient={"family": "random", "nu": 0.5, "Lambda": 2.0, "seed": 1})
    assert main(["symbol-dump", "--config", cfg, "--out", str(tmp_path / "o")]) == 2
    assert "CANCEL" in capsys.readouterr().err


def test_invalid_config_exit(tmp_path, capsys):
    cfg = write_config(tmp_path, grid={"d": 1, "n": 100, "box": 1.0})
    assert main(["solve", "--config", cfg]) == 2
    assert "grid.n" in capsys.readouterr().err


def test_mc_against_spectral(tmp_path):
    cfg = write_config(tmp_path, kernel={"family": "stable", "alpha": 1.0},
                       grid={"d": 1, "n": 256, "box": 32.0},
                       solve={"f": {"profile": "gauss", "width": 1.0}},
                       mc={"paths": 20000, "points": [[0.0], [1.0]], "lambda": 1.0})
    out = tmp_path / "out"
    assert main(["mc", "--config", cfg, "--out", str(out)]) == 0
    rep = io.read_json(out / "mc.json")
    assert rep["max_z"] <= 3.0


def test_console_script(tmp_path):
    cfg = write_config(tmp_path)
    proc = subprocess.run([sys.executable, "-m", "nonlocal_lp.cli", "kernel-check", "--config",
                           cfg, "--out", str(tmp_path / "o")], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert "H1" in proc.stdout
