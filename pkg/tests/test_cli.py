import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

GOLDEN = Path(__file__).parent / "golden"


def run(*args, cwd=None):
    return subprocess.run([sys.executable, "-m", "hulthen_pdm", *args],
                          capture_output=True, text=True, cwd=cwd)


def _wavefunction_rows(stdout):
    lines = stdout.splitlines()
    assert lines[0].startswith("# n=")
    header = dict(tok.split("=", 1) for tok in lines[0][2:].split())
    rows = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))
    return header, {k: np.array([float(r[k]) for r in rows]) for k in ("x", "s", "psi", "Phi")}


@pytest.mark.parametrize("name,args", [
    ("spectrum_reference.json", ["spectrum"]),
    ("verify_reference.json", ["verify"]),
    ("nu_demo_ho.json", ["nu-demo", "--model", "harmonic-oscillator", "--epsilon", "5"]),
])
def test_golden_json_byte_identical(name, args):
    r = run(*args)
    assert r.returncode == 0, r.stderr
    assert r.stdout == (GOLDEN / name).read_text()


def test_spectrum_reference_rows():
    doc = json.loads(run("spectrum").stdout)
    assert [lv["E_closed"] for lv in doc["levels"]] == [-7.29843788, -2.89531364, -0.492189406]
    assert list(doc) == ["params", "grid", "levels", "verdict", "version"]


def test_spectrum_csv():
    r = run("spectrum", "--format", "csv")
    assert r.returncode == 0
    rows = list(csv.DictReader(io.StringIO(r.stdout)))
    assert len(rows) == 3 and float(rows[2]["E_closed"]) == -0.492189406


def test_spectrum_empty_for_zero_depth():
    r = run("spectrum", "--v0", "0")
    assert r.returncode == 0
    assert json.loads(r.stdout)["levels"] == []


def test_exit_2_config_errors(tmp_path):
    assert run("nu-demo", "--model", "morse").returncode == 2
    assert run("spectrum", "--lambda", "-1").returncode == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("v0 = 10\nwidth = 3\n")
    r = run("spectrum", "--config", str(bad))
    assert r.returncode == 2 and "width" in r.stderr
    assert run("spectrum", "--config", str(tmp_path / "missing.cfg")).returncode == 2


def test_exit_3_complex_parameter():
    r = run("spectrum", "--alpha", "0", "--beta", "0")
    assert r.returncode == 3
    assert "mu_sq" in r.stderr and "-0.25" in r.stderr


def test_exit_4_bad_quantum_number():
    r = run("wavefunction", "--n", "5")
    assert r.returncode == 4 and r.stdout == ""
    assert run("wavefunction", "--n", "-1").returncode == 4


def test_exit_5_tight_tolerance_without_extrapolation():
    r = run("verify", "--tol", "1e-9", "--no-richardson")
    assert r.returncode == 5
    doc = json.loads(r.stdout)
    assert doc["verdict"]["status"] == "failed" and len(doc["levels"]) == 3


def test_exit_6_oracle_non_convergence():
    r = run("verify", "--v0", "0.1", "--max-grow", "0")
    assert r.returncode == 6
    doc = json.loads(r.stdout)
    assert doc["verdict"]["status"] == "oracle-non-convergence"
    assert doc["grid"]["convergence"][0]["max_leakage"] > 1e-8


def test_verify_report_columns():
    doc = json.loads((GOLDEN / "verify_reference.json").read_text())
    for lv in doc["levels"]:
        assert {"E_printed_case1", "E_printed_case2", "E_oracle_extrapolated",
                "rel_diff_closed_vs_oracle", "residual_ode", "physical"} <= set(lv)
        assert lv["rel_diff_closed_vs_oracle"] <= 1e-5
    assert doc["verdict"]["passed"] is True
    r = run("verify", "--format", "csv")
    header = r.stdout.splitlines()[0].split(",")
    assert "E_printed_case1" in header and "E_printed_case2" in header


def test_verify_half_line_warns():
    r = run("verify", "--q", "0.5", "--grid-n", "2000")
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["verdict"]["status"] == "regime-unverified" and doc["verdict"]["warning"] is True
    assert "warning:" in r.stderr


def test_wavefunction_normalized_samples():
    r = run("wavefunction", "--n", "0", "--grid-min", "-20", "--grid-max", "20", "--grid-n", "512",
            "--format", "csv")
    assert r.returncode == 0, r.stderr
    header, cols = _wavefunction_rows(r.stdout)
    assert header["n"] == "0" and float(header["jacobi_b"]) == 5.40312424
    assert len(cols["x"]) == 512
    dens = cols["Phi"] ** 2
    h = cols["x"][1] - cols["x"][0]
    assert float(np.sum(dens[1:] + dens[:-1]) * 0.5 * h) == pytest.approx(1.0, abs=1e-6)


def test_wavefunction_first_excited_has_one_node():
    r = run("wavefunction", "--n", "1", "--grid-n", "2001", "--format", "csv")
    _, cols = _wavefunction_rows(r.stdout)
    signs = np.sign(cols["psi"][cols["psi"] != 0])
    assert np.count_nonzero(signs[1:] != signs[:-1]) == 1


def test_wavefunction_json():
    doc = json.loads(run("wavefunction", "--n", "2", "--grid-n", "101").stdout)
    lv = doc["levels"][0]
    assert lv["n"] == 2 and len(lv["samples"]["Phi"]) == 101


def test_nu_demo_hulthen():
    doc = json.loads(run("nu-demo", "--model", "hulthen-pdm").stdout)
    chosen = [b for b in doc["levels"] if b["selected"]]
    assert len(chosen) == 1 and chosen[0]["admissible"]
    assert chosen[0]["tau_prime"] == pytest.approx(-7.403124, abs=1e-6)
    assert doc["verdict"]["quantized"] is True and doc["verdict"]["n_nearest"] == 0
    far = json.loads(run("nu-demo", "--model", "hulthen-pdm", "--energy", "-5").stdout)
    assert far["verdict"]["quantized"] is False and abs(far["verdict"]["mismatch"]) > 1e-3


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# deeper well\nV0 = 20\nlambda = 1.0\n")
    from_file = json.loads(run("spectrum", "--config", str(cfg)).stdout)
    assert from_file["params"]["V0"] == 20.0
    override = json.loads(run("spectrum", "--config", str(cfg), "--v0", "10").stdout)
    assert override == json.loads((GOLDEN / "spectrum_reference.json").read_text())


def test_out_writes_file_atomically(tmp_path):
    out = tmp_path / "spec.json"
    r = run("spectrum", "--out", str(out))
    assert r.returncode == 0 and r.stdout == ""
    assert out.read_text() == (GOLDEN / "spectrum_reference.json").read_text()
    assert [p.name for p in tmp_path.iterdir()] == ["spec.json"]
    r = run("spectrum", "--out", str(tmp_path / "no" / "such" / "dir.json"))
    assert r.returncode == 2
