"""Command-line entry point: benchmark runner and artifact I/O."""

import argparse
import json
import sys

import numpy as np

from .ansatz import build_ansatz
from .circuit import Circuit
from .estimate import estimate_energy, shot_bound
from .experiments import (
    BUILTIN_EXPERIMENTS, RunSpec, builtin_spec, build_model, export_plot_data,
    run_benchmark, shot_study,
)
from .measure import build_v, build_v_prime
from .pauli import pauli_from_label
from .postproc import make_postprocessor
from .train import StageConfig, TrainingConfig


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _training_config(blob):
    stages = tuple(StageConfig(**s) for s in blob.pop("stages"))
    return TrainingConfig(stages=stages, **blob)


def _run_spec_from_config(blob, out_dir):
    return RunSpec(
        experiment=blob.get("experiment", "custom"),
        model=blob["model"],
        ansatz=blob["ansatz"],
        post=blob.get("post"),
        config=_training_config(dict(blob["config"])),
        vqe_config=_training_config(dict(blob["vqe_config"]))
        if blob.get("vqe_config") else None,
        out_dir=out_dir,
    )


def cmd_run(args):
    if args.config:
        spec = _run_spec_from_config(_load_json(args.config), args.out)
        if args.seed is not None:
            spec.config.seed = args.seed
    else:
        spec = builtin_spec(args.experiment, seed=args.seed if args.seed is not None else 42,
                            restarts=args.restarts, out_dir=args.out)
    record = run_benchmark(spec)
    _emit(record.to_dict())


def cmd_estimate(args):
    ham = build_model({"file": args.hamiltonian})
    circuit = Circuit.load(args.circuit)
    blob = _load_json(args.post)
    spec = blob.get("spec", blob)
    spec = dict(spec, n_bits=circuit.n_qubits)
    spec.setdefault("seed", 0)
    post = make_postprocessor(spec)
    if "weights" in blob:
        post.set_weights(np.array(blob["weights"]))
    params = np.array(_load_json(args.params)["theta"])
    res = estimate_energy(circuit, params, post, ham, shot_plan=args.shots,
                          seed=args.seed, mode=args.mode)
    _emit({"value": res.value, "stderr": res.stderr, "shots": res.shots_used,
           "terms": list(res.per_term)}, args.out)


def cmd_plan(args):
    p = pauli_from_label(args.n, args.pauli)
    plan = (build_v_prime if args.prime else build_v)(p, include_cz=args.include_cz)
    _emit(plan.appended.to_dict(), args.out)


def cmd_ansatz(args):
    circuit = build_ansatz(args.family, args.n, p=args.p, depth=args.depth,
                           init_bits=args.init_bits)
    _emit(circuit.to_dict(), args.out)


def cmd_fit(args):
    spec = _run_spec_from_config(_load_json(args.config), args.out)
    if args.seed is not None:
        spec.config.seed = args.seed
    record = run_benchmark(spec)
    _emit(record.to_dict())


def cmd_shots(args):
    if args.bound:
        _emit({"r": args.r, "eps": args.eps, "shots": shot_bound(args.r, args.eps)},
              args.out)
        return
    shot_list = [int(s) for s in args.shots.split(",")]
    rows = shot_study(args.run, shot_list, args.repeats, args.seed or 0)
    _emit(rows, args.out)


def cmd_export(args):
    records = [_load_json(p) for p in args.records]
    csv = export_plot_data(records)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv)
    else:
        sys.stdout.write(csv)


def build_parser():
    parser = argparse.ArgumentParser(prog="vqnhe",
                                     description="Variational quantum-neural hybrid eigensolver toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a builtin or configured benchmark")
    p.add_argument("--experiment", choices=BUILTIN_EXPERIMENTS)
    p.add_argument("--config", help="RunSpec JSON file (overrides --experiment)")
    p.add_argument("--seed", type=int)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--out", help="output directory for record/log/checkpoints")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("estimate", help="estimate energy at fixed parameters")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--circuit", required=True)
    p.add_argument("--post", required=True)
    p.add_argument("--params", required=True)
    p.add_argument("--mode", default="exact",
                   choices=["exact", "infinite_shot", "sampled"])
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("plan", help="print the measurement circuit for a Pauli string")
    p.add_argument("--pauli", required=True, help='e.g. "Y2 Z3 X4"')
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--prime", action="store_true", help="imaginary-part basis")
    p.add_argument("--include-cz", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("ansatz", help="emit a circuit-family instance as JSON")
    p.add_argument("--family", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--init-bits")
    p.add_argument("--out")
    p.set_defaults(func=cmd_ansatz)

    p = sub.add_parser("fit", help="train from a RunSpec config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("shots", help="shot-budget studies at a trained checkpoint")
    p.add_argument("--run", help="run directory with a checkpoint")
    p.add_argument("--shots", help="comma-separated shot counts")
    p.add_argument("--repeats", type=int, default=20)
    p.add_argument("--seed", type=int)
    p.add_argument("--bound", action="store_true",
                   help="print the sufficient-shot bound for --r/--eps instead")
    p.add_argument("--r", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_shots)

    p = sub.add_parser("export", help="merge result records into plot-ready CSV")
    p.add_argument("--records", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
