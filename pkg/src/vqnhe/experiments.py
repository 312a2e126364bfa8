"""Named benchmark experiments, the reproducible runner, and data exports."""

import hashlib
import io
import json
import os
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import ansatz as ansatz_mod
from .circuit import Circuit
from .estimate import estimate_energy, stderr_bound
from .pauli import (
    build_heisenberg, build_tfim, exact_ground, parse_hamiltonian,
)
from .postproc import make_postprocessor
from .train import FitProblem, StageConfig, TrainingConfig, fit


class ExperimentError(ValueError):
    pass


@dataclass
class RunSpec:
    experiment: str
    model: dict                    # builder name/size/boundary or {"file": path}
    ansatz: dict                   # family + size arguments
    post: dict | None              # postprocessor spec (without n_bits/seed)
    config: TrainingConfig
    vqe_config: TrainingConfig | None = None
    out_dir: str | None = None


@dataclass
class ResultRecord:
    experiment: str
    energy: float
    vqe_energy: float | None
    reference: float
    rel_error: float
    vqe_rel_error: float | None
    shots: int | None
    wall_time: float
    seed: int
    config_hash: str

    def to_dict(self):
        return asdict(self)


def build_model(model):
    if "file" in model:
        with open(model["file"]) as fh:
            return parse_hamiltonian(fh.read())
    name = model["name"]
    if name == "tfim":
        return build_tfim(model["n"], model.get("boundary", "periodic"))
    if name == "heisenberg":
        return build_heisenberg(model["n"], model.get("boundary", "periodic"))
    raise ExperimentError(f"unknown model {name!r}")


def build_circuit(spec):
    return ansatz_mod.build_ansatz(
        spec["family"], spec["n"], p=spec.get("p"), depth=spec.get("depth"),
        init_bits=spec.get("init_bits"),
    )


def _post_factory(post_spec, n_bits):
    if post_spec is None:
        return None
    def factory(seed):
        spec = dict(post_spec)
        spec["n_bits"] = n_bits
        spec["seed"] = seed
        return make_postprocessor(spec)
    return factory


def _config_digest(spec):
    payload = {
        "experiment": spec.experiment,
        "model": spec.model,
        "ansatz": spec.ansatz,
        "post": spec.post,
        "config": _config_dict(spec.config),
        "vqe_config": _config_dict(spec.vqe_config) if spec.vqe_config else None,
    }
    blob = json.dumps(payload, sort_keys=True, default=_jsonable)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _config_dict(config):
    d = asdict(config)
    d["stages"] = [asdict(s) if not isinstance(s, dict) else s for s in config.stages]
    return d


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _fmt(x):
    return float(f"{x:.17g}")


def run_benchmark(spec):
    """Train the experiment, compare against exact diagonalization, and
    persist record, training log, and parameter checkpoints."""
    t0 = time.time()
    ham = build_model(spec.model)
    circuit = build_circuit(spec.ansatz)
    if circuit.n_qubits != ham.n_qubits:
        raise ExperimentError("ansatz/model size mismatch")
    reference, _ = exact_ground(ham)

    problem = FitProblem(ham, circuit, _post_factory(spec.post, ham.n_qubits))
    state = fit(problem, spec.config)
    vqe_energy = state.vqe_energy
    if vqe_energy is None and spec.vqe_config is not None:
        vqe_state = fit(FitProblem(ham, circuit, None), spec.vqe_config)
        vqe_energy = vqe_state.vqe_energy
        if vqe_energy is None:
            vqe_energy = vqe_state.best_energy

    rel = abs((state.best_energy - reference) / reference)
    vqe_rel = abs((vqe_energy - reference) / reference) if vqe_energy is not None else None
    record = ResultRecord(
        experiment=spec.experiment,
        energy=_fmt(state.best_energy),
        vqe_energy=_fmt(vqe_energy) if vqe_energy is not None else None,
        reference=_fmt(reference),
        rel_error=_fmt(rel),
        vqe_rel_error=_fmt(vqe_rel) if vqe_rel is not None else None,
        shots=None,
        wall_time=time.time() - t0,
        seed=spec.config.seed,
        config_hash=_config_digest(spec),
    )
    if spec.out_dir:
        _persist(spec, record, state, circuit)
    return record


def _persist(spec, record, state, circuit):
    out = spec.out_dir
    os.makedirs(out, exist_ok=True)
    with open(os.path.join(out, "record.json"), "w") as fh:
        json.dump(record.to_dict(), fh, indent=2)
    with open(os.path.join(out, "history.jsonl"), "w") as fh:
        for row in state.history:
            fh.write(json.dumps(row) + "\n")
    with open(os.path.join(out, "theta.json"), "w") as fh:
        json.dump({"theta": state.best_theta.tolist()}, fh)
    if spec.post is not None:
        with open(os.path.join(out, "post.json"), "w") as fh:
            json.dump({"spec": dict(spec.post, n_bits=circuit.n_qubits),
                       "weights": state.best_phi.tolist()}, fh)
    circuit.save(os.path.join(out, "circuit.json"))
    with open(os.path.join(out, "spec.json"), "w") as fh:
        json.dump({"experiment": spec.experiment, "model": spec.model,
                   "ansatz": spec.ansatz, "post": spec.post}, fh, indent=2)


def load_checkpoint(run_dir):
    """(hamiltonian, circuit, post, theta) from a persisted run directory."""
    with open(os.path.join(run_dir, "spec.json")) as fh:
        meta = json.load(fh)
    ham = build_model(meta["model"])
    circuit = Circuit.load(os.path.join(run_dir, "circuit.json"))
    with open(os.path.join(run_dir, "theta.json")) as fh:
        theta = np.array(json.load(fh)["theta"])
    post = None
    post_path = os.path.join(run_dir, "post.json")
    if os.path.exists(post_path):
        with open(post_path) as fh:
            blob = json.load(fh)
        post = make_postprocessor(dict(blob["spec"], seed=0))
        post.set_weights(np.array(blob["weights"]))
    return ham, circuit, post, theta


def shot_study(run_dir, shot_list, repeats, seed):
    """Sampled-estimate statistics at a trained checkpoint per shot budget."""
    if not os.path.exists(os.path.join(run_dir, "theta.json")):
        raise ExperimentError(f"no checkpoint in {run_dir}")
    ham, circuit, post, theta = load_checkpoint(run_dir)
    if post is None:
        from .postproc import TablePostprocessor
        post = TablePostprocessor(ham.n_qubits, np.ones(1 << ham.n_qubits))
    r = post.output_range()
    seq = np.random.SeedSequence(seed)
    rows = []
    for shots in shot_list:
        values = []
        for child in seq.spawn(repeats):
            res = estimate_energy(circuit, theta, post, ham, shot_plan=shots,
                                  seed=child.entropy & 0x7FFFFFFF, mode="sampled")
            values.append(res.value)
        rows.append({
            "shots": shots,
            "mean": float(np.mean(values)),
            "std": float(np.std(values, ddof=1)) if repeats > 1 else None,
            "stderr_bound": stderr_bound(r, shots),
        })
    return rows


def export_plot_data(records):
    """CSV of result records; stable column order, sorted by experiment."""
    if not records:
        raise ExperimentError("no records to export")
    rows = sorted(records, key=lambda r: r["experiment"] if isinstance(r, dict) else r.experiment)
    buf = io.StringIO()
    buf.write("experiment,energy,reference,rel_error,stderr\n")
    for r in rows:
        d = r if isinstance(r, dict) else r.to_dict()
        stderr = d.get("stderr", 0.0) or 0.0
        buf.write(f"{d['experiment']},{d['energy']!r},{d['reference']!r},"
                  f"{d['rel_error']!r},{stderr!r}\n")
    return buf.getvalue()


def _spin_config(seed, restarts, nn_lr=0.01, pqc_lr=0.001,
                 stage1_steps=600, stage2_steps=1500):
    return TrainingConfig(
        stages=(
            StageConfig(steps=stage1_steps, train_nn=False, use_post=False,
                        pqc_lr=0.01),
            StageConfig(steps=stage2_steps, pqc_lr=pqc_lr, nn_lr=nn_lr),
        ),
        restarts=restarts,
        seed=seed,
        patience=100,
    )


def builtin_spec(name, seed=42, restarts=20, out_dir=None):
    """Registry of the builtin benchmark experiments."""
    if name == "tfim12":
        return RunSpec(
            experiment=name,
            model={"name": "tfim", "n": 12, "boundary": "periodic"},
            ansatz={"family": "tfim_qaoa", "n": 12, "p": 2},
            post={"family": "mlp", "arch": {"hidden": [24, 12]}, "phi0_cutoff": 5.0},
            config=_spin_config(seed, restarts),
            out_dir=out_dir,
        )
    if name in ("heisenberg12", "heisenberg12_clamped"):
        cutoff = 1.0 if name.endswith("clamped") else 5.0
        return RunSpec(
            experiment=name,
            model={"name": "heisenberg", "n": 12, "boundary": "periodic"},
            ansatz={"family": "heisenberg_swap", "n": 12, "p": 2},
            post={"family": "mlp", "arch": {"hidden": [48, 24]},
                  "phi0_cutoff": cutoff},
            config=_spin_config(seed, restarts, nn_lr=0.02, pqc_lr=0.002),
            out_dir=out_dir,
        )
    if name == "tfim5_open":
        return RunSpec(
            experiment=name,
            model={"name": "tfim", "n": 5, "boundary": "open"},
            ansatz={"family": "tfim5_supp", "n": 5},
            post={"family": "mlp", "arch": {"hidden": [10, 20],
                                            "activations": ["relu", "sigmoid"]},
                  "phi0_cutoff": 5.0},
            config=TrainingConfig(
                stages=(StageConfig(steps=4000, pqc_lr=0.004, nn_lr=0.01),),
                restarts=max(4, restarts // 4),
                seed=seed,
                pqc_init_sigma=0.03,
                patience=400,
            ),
            vqe_config=TrainingConfig(
                stages=(StageConfig(steps=1500, train_nn=False, use_post=False,
                                    pqc_lr=0.01),),
                restarts=max(4, restarts // 4),
                seed=seed,
                patience=100,
            ),
            out_dir=out_dir,
        )
    raise ExperimentError(f"unknown builtin experiment {name!r}")


BUILTIN_EXPERIMENTS = ("tfim12", "heisenberg12", "heisenberg12_clamped", "tfim5_open")
