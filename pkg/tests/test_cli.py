import csv
import io
import json

import pytest

from disktrap.cli import main

SMALL = ["--set", "sweep.nb=[2e5, 4e5, 3]", "--set", "sweep.r_nm=[100, 140, 3]"]


def run(tmp_path, *argv):
    out = tmp_path / "out"
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_potential_fig3(tmp_path):
    code, out = run(tmp_path, "potential", "--config", "fig3")
    assert code == 0
    rows = read_csv(out / "potential.csv")
    assert {"blue_uK", "red_uK", "surface_uK", "total_uK"} <= set(rows[0])
    assert (out / "potential.gp").exists() and (out / "forces.gp").exists()
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["subcommand"] == "potential" and "potential.csv" in manifest["outputs"]
    assert (out / "potential.csv").read_text().startswith(f"# config_hash={manifest['config_hash']}")


def test_zero_intensity_total_is_surface(tmp_path):
    code, out = run(tmp_path, "potential", "--config", "zero_intensity")
    assert code == 0
    for row in read_csv(out / "potential.csv"):
        assert float(row["total_uK"]) == float(row["surface_uK"])


def test_fig2_crossover(tmp_path, capsys):
    code, out = run(tmp_path, "potential", "--config", "fig2")
    assert code == 0
    rows = read_csv(out / "potential.csv")
    cross = [float(r["r_nm"]) for r in rows if float(r["F_cp_uK_per_nm"]) <= float(r["F_vdw_uK_per_nm"])]
    assert abs(cross[0] - 130) < 15
    disc = json.loads((out / "discrepancy.json").read_text())
    assert "surface_force_100nm_uK_per_nm" in disc


def test_trap_report(tmp_path, capsys):
    code, out = run(tmp_path, "trap", "--config", "d30_optimum")
    assert code == 0
    doc = json.loads((out / "trap.json").read_text())
    assert doc["exists"] and 100 < doc["r_min_nm"] < 140
    assert "depth" in capsys.readouterr().out


def test_detect_sec2b(tmp_path):
    code, out = run(tmp_path, "detect", "--config", "sec2b")
    assert code == 0
    doc = json.loads((out / "detect.json").read_text())
    assert doc["flux_requirement"]["A_in_sq_per_s"] > 0


def test_detect_magnetic(tmp_path):
    code, out = run(tmp_path, "detect", "--config", "magnetic")
    assert code == 0
    doc = json.loads((out / "detect.json").read_text())
    assert abs(doc["magnetic"]["omega_kHz"] / 35 - 1) < 0.05
    assert "raman" in doc["magnetic"]


def test_backscatter(tmp_path, capsys):
    code, out = run(tmp_path, "backscatter", "--config", "backscatter")
    assert code == 0
    assert "0.99" in capsys.readouterr().out
    doc = json.loads((out / "backscatter.json").read_text())
    assert doc["required_coupling_fraction"] == pytest.approx(0.99, rel=1e-12)


def test_impossible_thresholds_exit_2(tmp_path):
    code, _ = run(tmp_path, "feasible", *SMALL, "--set", "feasibility.s_min=1e9")
    assert code == 2


def test_feasible_writes_region(tmp_path):
    code, out = run(tmp_path, "feasible", *SMALL)
    assert code in (0, 2)
    doc = json.loads((out / "feasible.json").read_text())
    assert doc["n_cells"] == 9


def test_bad_override_exit_1(tmp_path, capsys):
    code, _ = run(tmp_path, "trap", "--set", "trap.nonsense=1")
    assert code == 1
    assert "unknown config key" in capsys.readouterr().err


def test_bad_config_exit_1(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _ = run(tmp_path, "trap", "--config", str(bad))
    assert code == 1


def test_sweep_byte_identical(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    assert main(["sweep", *SMALL, "--out", str(a)]) == 0
    assert main(["sweep", *SMALL, "--out", str(b), "--workers", "2"]) == 0
    assert (a / "sweep.csv").read_bytes() == (b / "sweep.csv").read_bytes()


def test_sweep_json(tmp_path):
    code, out = run(tmp_path, "sweep", *SMALL, "--format", "json")
    assert code == 0
    doc = json.loads((out / "sweep.json").read_text())
    assert len(doc["cells"]) == 9 and doc["thresholds"]["s_min"] == 5


def test_nr_scan(tmp_path):
    code, out = run(tmp_path, "sweep", "--set", "sweep.mode=nr_scan", "--set", "sweep.nr_scan=[2e5, 5e5, 31]")
    assert code == 0
    assert (out / "nr_scan.csv").exists()
