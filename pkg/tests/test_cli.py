import json

import numpy as np
import pytest

from dhjac.cli import SWEEP_HEADER, main

from conftest import REFERENCE_CONFIG

CFG = str(REFERENCE_CONFIG)


def test_pose_ok(capsys):
    assert main(["pose", "0", "150", "10", "5", "--config", CFG]) == 0
    out = capsys.readouterr().out
    assert "cond(J_dh)" in out and "q_a:" in out


def test_pose_json_record(capsys):
    assert main(["pose", "0", "150", "10", "5", "--config", CFG, "--json"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["cond_Jdh"] >= 1.0
    assert np.isfinite(record["cond_Jdh"])
    assert len(record["q"]) == 4
    assert np.asarray(record["J_dh"]).shape == (4, 4)
    assert record["plan"] == [["1y", "2z"], ["2y", "3z"], ["3y", "4z"], ["4y", "1z"]]


def test_pose_outside_envelope_exit_2(capsys):
    assert main(["pose", "0", "150", "60", "0", "--config", CFG]) == 2
    assert "Unreachable" in capsys.readouterr().err


def test_malformed_config_exit_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    assert main(["pose", "0", "150", "0", "0", "--config", str(bad)]) == 3
    assert "config error" in capsys.readouterr().err


def test_degenerate_plan_exit_2(capsys):
    code = main(["pose", "0", "150", "10", "5", "--config", CFG,
                 "--plan", "opposite"])
    assert code == 2
    assert "DegeneratePair" in capsys.readouterr().err


def test_bad_plan_exit_3(capsys):
    assert main(["pose", "0", "150", "0", "0", "--config", CFG,
                 "--plan", "nonsense["]) == 3


def test_sweep_csv_contract(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--config", CFG, "--grid", "7", "--z", "150",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == SWEEP_HEADER
    assert len(lines) == 1 + 49
    first = lines[1].split(",")
    assert first[4] == "ok"
    # row-major order: theta outer, psi inner
    thetas = [float(l.split(",")[0]) for l in lines[1:]]
    psis = [float(l.split(",")[1]) for l in lines[1:]]
    assert thetas == sorted(thetas)
    assert psis[:7] == sorted(psis[:7])
    assert thetas[0] == -50.0 and thetas[-1] == 50.0
    # full-precision numeric fields survive a parse round trip
    val = first[2]
    assert float(val) == float(f"{float(val):.17g}")


def test_sweep_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["sweep", "--config", CFG, "--grid", "5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_sweep_units_match(tmp_path):
    mm, m = tmp_path / "mm.csv", tmp_path / "m.csv"
    assert main(["sweep", "--config", CFG, "--grid", "5", "--out", str(mm)]) == 0
    assert main(["sweep", "--config", CFG, "--grid", "5", "--unit", "m",
                 "--out", str(m)]) == 0
    rows_mm = [l.split(",") for l in mm.read_text().splitlines()[1:]]
    rows_m = [l.split(",") for l in m.read_text().splitlines()[1:]]
    for r_mm, r_m in zip(rows_mm, rows_m):
        k_mm, k_m = float(r_mm[3]), float(r_m[3])
        assert abs(k_mm - k_m) / k_mm < 1e-9      # cond(J_dh) unit-invariant
    g_dev = max(abs(float(a[2]) - float(b[2])) / float(a[2])
                for a, b in zip(rows_mm, rows_m))
    assert g_dev > 0.10                            # cond(G^T) is not


def test_sweep_range_guard(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["sweep", "--config", CFG, "--grid", "5", "--range-deg", "80",
                 "--out", str(out)]) == 3
    assert main(["sweep", "--config", CFG, "--grid", "5", "--range-deg", "80",
                 "--envelope-deg", "85", "--out", str(out)]) == 0


def test_sweep_unwritable_exit_4(tmp_path):
    assert main(["sweep", "--config", CFG, "--grid", "5",
                 "--out", str(tmp_path / "missing" / "x.csv")]) == 4


def test_units_command(tmp_path, capsys):
    out = tmp_path / "units.json"
    assert main(["units", "--config", CFG, "--grid", "5", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["k_dh_invariant"] is True
    assert report["k_G_unit_sensitive"] is True
    assert report["unit_scaled"] == "m"
    csv_lines = (tmp_path / "units.csv").read_text().splitlines()
    assert csv_lines[0].startswith("theta_deg,psi_deg,cond_G_base")
    assert len(csv_lines) == 1 + 25


def test_units_noop_scale(tmp_path):
    out = tmp_path / "noop.json"
    assert main(["units", "--config", CFG, "--grid", "3", "--scale", "1.0",
                 "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["max_rel_dev_k_dh"] == 0.0
    assert report["max_rel_dev_k_G"] == 0.0


def test_validate_reference(tmp_path, capsys):
    out = tmp_path / "validation_report.json"
    assert main(["validate", "--config", CFG, "--poses", "10", "--seed", "42",
                 "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["all_passed"] is True
    assert "PASS" in capsys.readouterr().out


def test_validate_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["validate", "--config", CFG, "--poses", "6", "--seed", "1",
                     "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_validate_unreachable_config(tmp_path):
    cfg = tmp_path / "short.json"
    cfg.write_text(json.dumps({
        "unit": "mm", "r_a": 200.0, "r_b": 450.0, "l": 100.0,
        "actuator": "linear",
        "limbs": [
            {"angle_deg": 0.0, "kind": "PUS", "base_angle_deg": 45.0},
            {"angle_deg": 90.0, "kind": "PRS"},
            {"angle_deg": 180.0, "kind": "PUS", "base_angle_deg": 135.0},
            {"angle_deg": 270.0, "kind": "PRS"},
        ],
        "mobility": {"lambda": 6, "n": 10, "j": 12, "f_sum": 22},
    }))
    out = tmp_path / "report.json"
    assert main(["validate", "--config", str(cfg), "--poses", "5",
                 "--out", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["all_passed"] is False
    assert all(f["code"] == "unreachable" for f in report["pose_failures"])


def test_explicit_json_plan(tmp_path, capsys):
    plan = json.dumps([["1y", "3z"], ["2y", "1z"], ["3y", "2z"], ["4y", "3z"]])
    assert main(["pose", "0", "150", "10", "5", "--config", CFG,
                 "--plan", plan, "--json"]) == 0
    record = json.loads(capsys.readouterr().out)
    assert record["plan"][0] == ["1y", "3z"]
