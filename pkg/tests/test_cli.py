import json
import os

import numpy as np
import pytest

from vqnhe.circuit import Circuit
from vqnhe.cli import main
from vqnhe.pauli import build_tfim, serialize_hamiltonian


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ansatz_command(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run_cli(capsys, "ansatz", "--family", "heisenberg_swap",
                         "--n", "12", "--p", "2", "--out", str(out))
    assert code == 0
    c = Circuit.load(str(out))
    assert c.n_qubits == 12 and c.n_params == 24


def test_plan_command(capsys):
    code, out, _ = run_cli(capsys, "plan", "--pauli", "Y2 Z3 X4", "--n", "5")
    assert code == 0
    d = json.loads(out)
    kinds = [g["kind"] for g in d["gates"]]
    assert kinds == ["CX", "RX"]


def test_estimate_command(tmp_path, capsys):
    ham = tmp_path / "h.txt"
    ham.write_text(serialize_hamiltonian(build_tfim(4, "periodic")))
    circ = tmp_path / "c.json"
    code, _, _ = run_cli(capsys, "ansatz", "--family", "tfim_qaoa",
                         "--n", "4", "--p", "1", "--out", str(circ))
    assert code == 0
    post = tmp_path / "f.json"
    post.write_text(json.dumps({"family": "mlp", "arch": {"hidden": [5]},
                                "seed": 1}))
    params = tmp_path / "p.json"
    params.write_text(json.dumps({"theta": [0.1] * 8}))
    code, out, _ = run_cli(capsys, "estimate", "--hamiltonian", str(ham),
                           "--circuit", str(circ), "--post", str(post),
                           "--params", str(params), "--mode", "exact")
    assert code == 0
    res = json.loads(out)
    assert np.isfinite(res["value"]) and res["stderr"] == 0.0
    code, out, _ = run_cli(capsys, "estimate", "--hamiltonian", str(ham),
                           "--circuit", str(circ), "--post", str(post),
                           "--params", str(params), "--mode", "sampled",
                           "--shots", "2000", "--seed", "7")
    assert code == 0
    sampled = json.loads(out)
    assert abs(sampled["value"] - res["value"]) <= 6 * sampled["stderr"] + 0.05
    assert sampled["shots"] > 0 and len(sampled["terms"]) == 8


def _tiny_run_config(tmp_path):
    return {
        "experiment": "tiny",
        "model": {"name": "tfim", "n": 3, "boundary": "periodic"},
        "ansatz": {"family": "tfim_qaoa", "n": 3, "p": 1},
        "post": {"family": "mlp", "arch": {"hidden": [4]}, "phi0_cutoff": 5.0},
        "config": {
            "stages": [
                {"steps": 60, "use_post": False, "train_nn": False,
                 "pqc_lr": 0.02},
                {"steps": 60, "pqc_lr": 0.002, "nn_lr": 0.02},
            ],
            "restarts": 1,
            "seed": 5,
        },
    }


def test_run_command_with_config(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(_tiny_run_config(tmp_path)))
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(capsys, "run", "--config", str(cfg),
                           "--out", str(out_dir))
    assert code == 0
    record = json.loads(out)
    # relative error recomputes from the stored energies at 1e-12
    recomputed = abs((record["energy"] - record["reference"]) / record["reference"])
    assert abs(recomputed - record["rel_error"]) <= 1e-12
    for name in ("record.json", "history.jsonl", "theta.json", "post.json",
                 "circuit.json", "spec.json"):
        assert (out_dir / name).exists()
    with open(out_dir / "history.jsonl") as fh:
        rows = [json.loads(ln) for ln in fh]
    assert {"step", "stage", "energy", "lr_pqc", "lr_nn"} <= set(rows[0])


def test_run_determinism(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(_tiny_run_config(tmp_path)))
    records = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "run", "--config", str(cfg))
        assert code == 0
        records.append(json.loads(out))
    assert records[0]["energy"] == records[1]["energy"]
    assert records[0]["config_hash"] == records[1]["config_hash"]


def test_shots_command(tmp_path, capsys):
    code, out, _ = run_cli(capsys, "shots", "--bound", "--r", "1.0",
                           "--eps", "0.015")
    assert code == 0
    assert json.loads(out)["shots"] == 10000

    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(_tiny_run_config(tmp_path)))
    out_dir = tmp_path / "out"
    code, _, _ = run_cli(capsys, "run", "--config", str(cfg),
                         "--out", str(out_dir))
    assert code == 0
    code, out, _ = run_cli(capsys, "shots", "--run", str(out_dir),
                           "--shots", "500,2000", "--repeats", "5",
                           "--seed", "3")
    assert code == 0
    rows = json.loads(out)
    assert [r["shots"] for r in rows] == [500, 2000]
    assert all(r["std"] is not None and r["stderr_bound"] > 0 for r in rows)


def test_shots_repeats_one_marker(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps(_tiny_run_config(tmp_path)))
    out_dir = tmp_path / "out"
    run_cli(capsys, "run", "--config", str(cfg), "--out", str(out_dir))
    code, out, _ = run_cli(capsys, "shots", "--run", str(out_dir),
                           "--shots", "500", "--repeats", "1", "--seed", "0")
    assert code == 0
    assert json.loads(out)[0]["std"] is None


def test_export_command(tmp_path, capsys):
    recs = []
    for name, e in (("zeta", -1.5), ("alpha", -2.0)):
        p = tmp_path / f"{name}.json"
        rec = {"experiment": name, "energy": e, "reference": e - 0.001,
               "rel_error": abs(0.001 / (e - 0.001)), "stderr": 0.0}
        p.write_text(json.dumps(rec))
        recs.append(str(p))
    code, out, _ = run_cli(capsys, "export", "--records", *recs)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "experiment,energy,reference,rel_error,stderr"
    assert lines[1].startswith("alpha,") and lines[2].startswith("zeta,")
    # full-precision numeric round trip
    fields = lines[2].split(",")
    assert float(fields[1]) == -1.5
    # bit-identical re-export
    code, out2, _ = run_cli(capsys, "export", "--records", *recs)
    assert out2 == out


def test_single_record_export(tmp_path, capsys):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"experiment": "a", "energy": -1.0,
                             "reference": -1.0, "rel_error": 0.0}))
    code, out, _ = run_cli(capsys, "export", "--records", str(p))
    assert code == 0
    assert len(out.strip().split("\n")) == 2


def test_error_is_machine_readable(capsys, tmp_path):
    code, _, err = run_cli(capsys, "run", "--experiment", "tfim12",
                           "--config", str(tmp_path / "missing.json"))
    assert code != 0
    blob = json.loads(err.strip().splitlines()[-1])
    assert "error" in blob and "message" in blob


def test_shots_missing_checkpoint(tmp_path, capsys):
    code, _, err = run_cli(capsys, "shots", "--run", str(tmp_path),
                           "--shots", "100", "--repeats", "2")
    assert code != 0
    assert "error" in json.loads(err.strip().splitlines()[-1])
