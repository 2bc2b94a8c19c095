import json
import subprocess
import sys

import numpy as np
import pytest

from trpnet.cli import main, parse_spiral_range
from trpnet.io import read_csv, read_heff, sha256_file
from trpnet.unitcell import bundled_structure_path, bundled_unit_cell_path


def run(*argv):
    return main(["-q", *map(str, argv)])


def test_extract_golden(tmp_path):
    out = tmp_path / "cell.ucell"
    assert run("extract", bundled_structure_path(), "--label", "tubulin_dimer", "--out", out) == 0
    assert out.read_bytes() == bundled_unit_cell_path().read_bytes()


def test_extract_missing_file(tmp_path, capsys):
    assert run("extract", tmp_path / "nope.pdb", "--out", tmp_path / "x.ucell") == 2
    assert "nope.pdb" in capsys.readouterr().err


def test_extract_empty_structure(tmp_path):
    pdb = tmp_path / "empty.pdb"
    pdb.write_text("HEADER EMPTY\nEND\n")
    assert run("extract", pdb, "--out", tmp_path / "x.ucell") == 2


def test_extract_missing_anchor(tmp_path):
    assert run("extract", bundled_structure_path(), "--anchor", "OXT", "--out", tmp_path / "x.ucell") == 3


def test_spectrum_outputs_and_manifest(tmp_path):
    prefix = tmp_path / "mt2"
    code = run("spectrum", "--spirals", 2, "--sigma", 5, "--dump-heff", "--zero-diagonal-dump", "--out", prefix)
    assert code == 0
    header, rows = read_csv(f"{prefix}_spectrum.csv")
    assert header == ["j", "E_minus_E0_cm1", "Gamma_over_gamma"] and rows.shape == (208, 3)
    assert rows[:, 2].sum() == pytest.approx(208, rel=1e-8)
    metrics = json.loads(open(f"{prefix}_metrics.json").read())
    assert metrics["n"] == 208 and metrics["max_ratio"] == pytest.approx(rows[:, 2].max())
    H = read_heff(f"{prefix}_heff.bin")
    Z = read_heff(f"{prefix}_heff_zero_diag.bin")
    assert np.all(np.diag(Z).real == 0) and np.array_equal(H[~np.eye(208, dtype=bool)], Z[~np.eye(208, dtype=bool)])
    for name in ("absorption", "fluorescence"):
        h, curve = read_csv(f"{prefix}_{name}.csv")
        assert h == ["x", "value"] and curve[:, 1].max() == pytest.approx(1.0)
    manifest = json.loads(open(f"{prefix}_manifest.json").read())
    assert manifest["command"] == "spectrum"
    assert manifest["geometry"] == {"kind": "mt", "n_spirals": 2}
    assert manifest["constants"]["k0"] == 2.24e-3
    assert manifest["inputs"]["unit_cell"]["bundled"] is True
    for entry in manifest["outputs"]:
        assert sha256_file(entry["path"]) == entry["sha256"]


def test_rerun_is_bit_identical(tmp_path):
    first = tmp_path / "a"
    assert run("spectrum", "--spirals", 1, "--disorder-w", 100, "--seed", 3, "--out", first) == 0
    assert run("rerun", f"{first}_manifest.json", "--out", tmp_path / "b") == 0
    assert (tmp_path / "a_spectrum.csv").read_bytes() == (tmp_path / "b_spectrum.csv").read_bytes()
    assert (tmp_path / "a_metrics.json").read_bytes() == (tmp_path / "b_metrics.json").read_bytes()


def test_sweep(tmp_path):
    assert run("sweep", "--spirals", "1:2", "--with-subunits", "--out", tmp_path / "s") == 0
    header, rows = read_csv(tmp_path / "s_sweep.csv")
    assert header == ["N_trp", "qy", "max_ratio"]
    assert rows[:, 0].tolist() == [1, 8, 104, 208]
    assert rows[0, 1] == pytest.approx(0.1298, abs=1e-4) and rows[0, 2] == 1.0


def test_disorder(tmp_path):
    assert run("disorder", "--spirals", 1, "--disorder-w", 0, 200, "--realizations", 2, "--out", tmp_path / "d") == 0
    header, rows = read_csv(tmp_path / "d_disorder.csv")
    assert header[:5] == ["W", "mean_qy", "std_qy", "mean_max_ratio", "std_max_ratio"]
    assert rows[0, 2] == 0.0 and rows.shape == (2, 6)


def test_zero_spirals_is_domain_error(tmp_path):
    assert run("spectrum", "--spirals", 0, "--out", tmp_path / "x") == 4


def test_capacity_exit_code(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SIM_MAX_N", "50")
    assert run("spectrum", "--spirals", 1, "--out", tmp_path / "x") == 4
    assert "N=104" in capsys.readouterr().err


def test_bad_unit_cell_file(tmp_path):
    bad = tmp_path / "bad.ucell"
    bad.write_text("# unitcell v1 mu2=1.0\n0 0 0 0.9 0 0\n")
    assert run("spectrum", "--spirals", 1, "--unit-cell", bad, "--out", tmp_path / "x") == 2


def test_spiral_range():
    assert parse_spiral_range("3") == [3]
    assert parse_spiral_range("2:5") == [2, 3, 4, 5]
    assert parse_spiral_range("1,10,20") == [1, 10, 20]


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "trpnet.cli", "--version"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.startswith("trpnet ")


def test_sweep_twice_identical(tmp_path):
    for name in ("a", "b"):
        assert run("sweep", "--spirals", "1,2", "--out", tmp_path / name) == 0
    assert (tmp_path / "a_sweep.csv").read_bytes() == (tmp_path / "b_sweep.csv").read_bytes()


def test_rerun_resolves_relative_inputs(tmp_path, monkeypatch):
    work = tmp_path / "work"
    work.mkdir()
    (work / "cell.ucell").write_bytes(bundled_unit_cell_path().read_bytes())
    monkeypatch.chdir(work)
    assert run("spectrum", "--spirals", 1, "--unit-cell", "cell.ucell", "--out", "first") == 0
    elsewhere = tmp_path / "elsewhere"
    elsewhere.mkdir()
    monkeypatch.chdir(elsewhere)
    assert run("rerun", work / "first_manifest.json", "--out", "second") == 0
    assert (work / "first_spectrum.csv").read_bytes() == (elsewhere / "second_spectrum.csv").read_bytes()
