"""Command-line surface: artifacts, determinism, exit codes, config schema."""
import csv
import json

import numpy as np
import pytest

from qbsim.cli import main
from qbsim.fitting import _model_branch_energies
from qbsim.presets import device_preset


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_simulate_writes_trajectory_and_meta(tmp_path):
    out = tmp_path / "run"
    code = main([
        "simulate", "--preset", "mechanism1", "--charge-ns", "5", "--relax-ns", "5",
        "--out-dir", str(out),
    ])
    assert code == 0
    rows = _read_csv(out / "trajectory.csv")
    header = list(rows[0])
    assert header == ["t_ns", "p_ground", "mean_photons", "p_d_s1", "p_a_s1", "p_a_t1", "phase"]
    assert rows[0]["t_ns"] == "0" and rows[0]["p_ground"] == "1"
    assert rows[-1]["phase"] == "relax"
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["command"] == "simulate"
    assert meta["device"]["omega_d"] == 2.34


def test_simulate_is_deterministic(tmp_path):
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main([
            "simulate", "--preset", "mechanism2", "--charge-ns", "2", "--relax-ns", "2",
            "--out-dir", str(out),
        ]) == 0
        outs.append((out / "trajectory.csv").read_bytes())
    assert outs[0] == outs[1]


def test_simulate_requires_a_device(tmp_path, capsys):
    code = main(["simulate", "--out-dir", str(tmp_path)])
    assert code == 2
    assert "no device" in capsys.readouterr().err


def test_config_schema_is_strict(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"devices": {"preset": "cavity1"}}))
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert "devices" in capsys.readouterr().err

    cfg.write_text(json.dumps({"device": {"preset": "cavity1", "omega_x": 2.0}}))
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2
    assert "omega_x" in capsys.readouterr().err

    cfg.write_text("{not json")
    assert main(["simulate", "--config", str(cfg), "--out-dir", str(tmp_path)]) == 2


def test_precision_floor(tmp_path, capsys):
    code = main([
        "simulate", "--preset", "mechanism1", "--charge-ns", "1", "--relax-ns", "1",
        "--precision", "6", "--out-dir", str(tmp_path),
    ])
    assert code == 2
    assert "precision" in capsys.readouterr().err


def test_polaritons_normal_incidence_energies(tmp_path):
    out = tmp_path / "pol"
    assert main(["polaritons", "--preset", "cavity4", "--out-dir", str(out)]) == 0
    rows = _read_csv(out / "branches.csv")
    by_branch = {r["branch"]: r for r in rows}
    assert set(by_branch) == {"LP", "MP", "UP", "TT"}
    assert float(by_branch["LP"]["energy_ev"]) == pytest.approx(1.7613, abs=5e-4)
    assert float(by_branch["TT"]["w_t"]) == pytest.approx(1.0, abs=1e-12)
    weights = [float(by_branch["LP"][k]) for k in ("w_cavity", "w_d", "w_a", "w_t")]
    assert sum(weights) == pytest.approx(1.0, abs=1e-9)
    # a 5 meV triplet coupling pushes the lower branch off the bare position
    coupled = tmp_path / "pol_jt"
    assert main([
        "polaritons", "--preset", "cavity4", "--j-t", "0.005", "--out-dir", str(coupled),
    ]) == 0
    lp_jt = next(
        float(r["energy_ev"]) for r in _read_csv(coupled / "branches.csv") if r["branch"] == "LP"
    )
    assert lp_jt > float(by_branch["LP"]["energy_ev"])


def test_polaritons_angle_scan_rows(tmp_path):
    out = tmp_path / "scan"
    assert main([
        "polaritons", "--preset", "cavity1", "--theta", "0", "--theta-to", "30",
        "--theta-steps", "4", "--out-dir", str(out),
    ]) == 0
    rows = _read_csv(out / "branches.csv")
    assert len(rows) == 16
    assert sorted({r["theta_deg"] for r in rows}) == ["0", "10", "20", "30"]


def test_sweep_single_point(tmp_path):
    out = tmp_path / "sw"
    assert main([
        "sweep", "--preset", "mechanism2", "--from", "1.856", "--to", "1.856",
        "--steps", "1", "--charge-ns" if False else "--probe-ns", "10",
        "--out-dir", str(out),
    ]) == 0
    rows = _read_csv(out / "sweep.csv")
    assert len(rows) == 1
    assert list(rows[0])[:2] == ["omega0_ev", "p_t1_probe"]
    assert 0.0 < float(rows[0]["p_t1_probe"]) < 1.0


def test_fit_dispersion_round_trip(tmp_path):
    truth = device_preset("cavity4")
    data = tmp_path / "disp.csv"
    with open(data, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theta_deg", "branch", "energy_ev"])
        for th in np.linspace(0.0, 60.0, 13):
            for b, e in _model_branch_energies(truth, th).items():
                writer.writerow([th, b, repr(float(e))])
    out = tmp_path / "fit"
    assert main([
        "fit-dispersion", "--in", str(data), "--init-preset", "cavity1",
        "--out-dir", str(out),
    ]) == 0
    rows = {r["param"]: float(r["value"]) for r in _read_csv(out / "fit.csv")}
    assert rows["omega_c0"] == pytest.approx(truth.omega_c0, abs=1e-6)
    assert rows["j_d"] == pytest.approx(truth.j_d, abs=1e-6)
    assert rows["j_a"] == pytest.approx(truth.j_a, abs=1e-6)


def test_fit_dispersion_reports_missing_column(tmp_path, capsys):
    data = tmp_path / "disp.csv"
    data.write_text("theta_deg,energy_ev\n0,1.76\n")
    assert main(["fit-dispersion", "--in", str(data), "--out-dir", str(tmp_path)]) == 2
    assert "branch" in capsys.readouterr().err


def test_fit_jt_needs_at_least_two_devices(tmp_path, capsys):
    data = tmp_path / "features.csv"
    data.write_text(
        "delta_e_ev,rel_fluor,rel_sharp,rel_phos_rate\n"
        "0.216,1,1,1\n0.094,0.99,0.89,1.52\n0.011,0.89,0.96,2.46\n"
    )
    code = main([
        "fit-jt", "--in", str(data), "--devices", "cavity1", "--out-dir", str(tmp_path),
    ])
    assert code == 2


def test_figures_data_bundle(tmp_path):
    out = tmp_path / "figs"
    assert main([
        "figures-data", "--charge-ns", "1", "--relax-ns", "10", "--sweep-steps", "3",
        "--out-dir", str(out),
    ]) == 0
    expected = {
        "dynamics_mechanism1.csv": "t_ns",
        "dynamics_mechanism2.csv": "t_ns",
        "sweep_mechanism2.csv": "omega0_ev",
        "branches_cavity4.csv": "theta_deg",
        "features_5mev.csv": "delta_e_ev",
    }
    for name, first_col in expected.items():
        rows = _read_csv(out / name)
        assert rows, name
        assert list(rows[0])[0] == first_col, name
