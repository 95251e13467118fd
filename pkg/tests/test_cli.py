"""Command-line interface: run, figure, verify, exit codes, file formats."""

import hashlib
import json
import math

import numpy as np
import pytest

import tavis_sim
from tavis_sim.cli import build_scenario, main, run_verification
from tavis_sim.dynamics import simulate
from tavis_sim import model as model_module

SMALL_RUN = {
    "model": {"num_qubits": 2},
    "coherent": {"nbar": 6.0, "theta": 0.25},
    "initial_qubits": {"family": "basin", "a": [0.5, 0.0]},
    "time_grid": {"t_max_over_tr": 0.2, "samples": 40},
    "observables": ["p_initial", "p_attractor", "entropy", "mixed_tangle"],
}


def write_config(tmp_path, payload, name="scenario.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return path


def test_run_writes_csv_and_manifest(tmp_path):
    config = write_config(tmp_path, SMALL_RUN)
    assert main(["run", str(config), "--out", str(tmp_path)]) == 0
    csv_path = tmp_path / "scenario.csv"
    manifest_path = tmp_path / "scenario_manifest.json"
    assert csv_path.exists() and manifest_path.exists()

    lines = csv_path.read_text().splitlines()
    header = lines[0].split(",")
    assert header == ["t", "t_over_tr", "p_initial", "p_attractor_plus",
                      "entropy", "mixed_tangle"]
    assert len(lines) == 1 + SMALL_RUN["time_grid"]["samples"]

    manifest = json.loads(manifest_path.read_text())
    assert manifest["version"] == tavis_sim.__version__
    assert manifest["duration_seconds"] > 0
    entry = manifest["files"][0]
    assert entry["path"] == "scenario.csv"
    assert entry["sha256"] == hashlib.sha256(csv_path.read_bytes()).hexdigest()
    # the echoed config records the filled-in defaults
    assert manifest["config"]["model"]["fock_dim"] >= 6
    assert manifest["config"]["attractor_sign"] == "+"


def test_csv_round_trips_doubles(tmp_path):
    config = write_config(tmp_path, SMALL_RUN)
    assert main(["run", str(config), "--out", str(tmp_path)]) == 0
    series = simulate(build_scenario(SMALL_RUN))
    lines = (tmp_path / "scenario.csv").read_text().splitlines()
    names = lines[0].split(",")[2:]
    for j, line in enumerate(lines[1:]):
        parts = [float(x) for x in line.split(",")]
        assert parts[0] == float(series.times[j])  # exact round-trip
        for name, value in zip(names, parts[2:]):
            assert value == float(series.columns[name][j])


def test_csv_uses_lf_line_endings(tmp_path):
    config = write_config(tmp_path, SMALL_RUN)
    main(["run", str(config), "--out", str(tmp_path)])
    raw = (tmp_path / "scenario.csv").read_bytes()
    assert b"\r" not in raw


def test_run_rejects_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert main(["run", str(path), "--out", str(tmp_path)]) == 2


def test_run_rejects_missing_file(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == 2


def test_run_rejects_schema_violations(tmp_path):
    bad = dict(SMALL_RUN)
    bad["coherent"] = {"nbar": -1.0}
    assert main(["run", str(write_config(tmp_path, bad)), "--out",
                 str(tmp_path)]) == 2
    unknown_key = dict(SMALL_RUN)
    unknown_key["surprise"] = 1
    assert main(["run", str(write_config(tmp_path, unknown_key, "u.json")),
                 "--out", str(tmp_path)]) == 2
    bad_observable = dict(SMALL_RUN)
    bad_observable["observables"] = ["p_initial", "momentum"]
    assert main(["run", str(write_config(tmp_path, bad_observable, "o.json")),
                 "--out", str(tmp_path)]) == 2


def test_run_truncation_exit_code(tmp_path):
    payload = {
        "model": {"num_qubits": 1, "fock_dim": 20},
        "coherent": {"nbar": 50.0, "fock_dim": 20},
    }
    assert main(["run", str(write_config(tmp_path, payload)), "--out",
                 str(tmp_path)]) == 3


def test_run_dimension_cap_exit_code(tmp_path):
    payload = {
        "model": {"num_qubits": 14, "fock_dim": 136},
        "coherent": {"nbar": 50.0, "fock_dim": 136},
    }
    assert main(["run", str(write_config(tmp_path, payload)), "--out",
                 str(tmp_path)]) == 4


def test_figure_fig3_tangle_sweep(tmp_path):
    assert main(["figure", "fig3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig3.csv").read_text().splitlines()
    assert lines[0] == "a,pure_tangle"
    rows = [tuple(float(x) for x in line.split(",")) for line in lines[1:]]
    assert len(rows) == 401
    assert rows[0][0] == pytest.approx(-1.0 / math.sqrt(2.0))
    assert rows[-1][0] == pytest.approx(1.0 / math.sqrt(2.0))
    for a, tangle in rows[::40]:
        assert tangle == pytest.approx((4.0 * a * a - 1.0) ** 2, abs=1e-12)


def test_figure_fig1_header(tmp_path):
    assert main(["figure", "fig1", "--nbar", "4", "--samples", "50",
                 "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "fig1.csv").read_text().splitlines()
    assert lines[0] == "t,t_over_tr,p_initial,p_attractor_plus,entropy"
    assert len(lines) == 51


def test_figure_fig4_includes_tangle(tmp_path):
    assert main(["figure", "fig4", "--nbar", "4", "--samples", "40",
                 "--out", str(tmp_path)]) == 0
    header = (tmp_path / "fig4.csv").read_text().splitlines()[0]
    assert header.endswith(",mixed_tangle")


def test_figure_qfunc_snapshots(tmp_path):
    assert main(["figure", "qfunc", "--nbar", "4", "--times", "0,0.5",
                 "--out", str(tmp_path)]) == 0
    for name in ("qfunc_t0.csv", "qfunc_t0p5.csv"):
        lines = (tmp_path / name).read_text().splitlines()
        assert lines[0] == "re,im,q"
        assert len(lines) == 1 + 201 * 201
    # t = 0: field still coherent, Q peaks at alpha = sqrt(nbar)
    rows = np.loadtxt(tmp_path / "qfunc_t0.csv", delimiter=",", skiprows=1)
    best = rows[np.argmax(rows[:, 2])]
    assert best[0] == pytest.approx(2.0, abs=0.05)
    assert best[1] == pytest.approx(0.0, abs=0.05)
    assert best[2] == pytest.approx(1.0, abs=1e-3)


def test_verification_all_pass():
    results = run_verification(max_dim=128)
    assert len(results) >= 8
    for name, passed, detail in results:
        assert passed, f"{name}: {detail}"


def test_verify_exit_codes(tmp_path):
    assert main(["verify", "--max-dim", "128"]) == 0


def test_verify_detects_injected_fault(monkeypatch):
    # corrupt one coupling element; the dense oracle is built independently,
    # so the cross-check must fail and the exit code must flip to 1
    original = model_module.block_hamiltonian

    def corrupted(params, members):
        h = original(params, members)
        if h.shape[0] > 1:
            h = h.copy()
            h[0, 1] += 1e-5
            h[1, 0] += 1e-5
        return h

    monkeypatch.setattr(model_module, "block_hamiltonian", corrupted)
    results = run_verification(max_dim=128)
    failed = [name for name, passed, _ in results if not passed]
    assert "block-vs-dense evolution" in failed
    assert main(["verify", "--max-dim", "128"]) == 1
