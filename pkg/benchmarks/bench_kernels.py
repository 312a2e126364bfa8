"""Compare the numba and pure-numpy gate kernels on a layered random circuit.

Usage: python3 benchmarks/bench_kernels.py [--n 16] [--layers 8] [--repeats 5]
"""

import argparse
import time

import numpy as np


def build_circuit(n, layers, rng):
    from vqnhe.circuit import Circuit, Gate
    gates = [Gate("H", (i,)) for i in range(n)]
    slot = 0
    for _ in range(layers):
        for i in range(n):
            gates.append(Gate("RX", (i,), param=slot))
            slot += 1
        for i in range(0, n - 1, 2):
            gates.append(Gate("EXP_SWAP", (i, i + 1), param=slot))
            slot += 1
        for i in range(1, n - 1, 2):
            gates.append(Gate("CX", (i, i + 1)))
    circuit = Circuit(n, tuple(gates), n_params=slot)
    params = rng.normal(0, 0.3, slot)
    return circuit, params


def bench(backend, n, layers, repeats, seed):
    import importlib
    import os
    os.environ["VQNHE_BACKEND"] = backend
    import vqnhe.backend
    importlib.reload(vqnhe.backend)
    import vqnhe.statevector
    importlib.reload(vqnhe.statevector)
    from vqnhe.statevector import run_circuit

    rng = np.random.default_rng(seed)
    circuit, params = build_circuit(n, layers, rng)
    run_circuit(circuit, params)  # warm-up (JIT compile for numba)
    times = []
    final = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        final = run_circuit(circuit, params)
        times.append(time.perf_counter() - t0)
    return min(times), final.amplitudes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=16)
    ap.add_argument("--layers", type=int, default=8)
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    t_np, amp_np = bench("numpy", args.n, args.layers, args.repeats, args.seed)
    t_nb, amp_nb = bench("numba", args.n, args.layers, args.repeats, args.seed)
    drift = np.max(np.abs(amp_np - amp_nb))
    print(f"{args.n} qubits, {args.layers} layers, best of {args.repeats}:")
    print(f"  numpy : {t_np * 1e3:8.2f} ms")
    print(f"  numba : {t_nb * 1e3:8.2f} ms   (speedup {t_np / t_nb:.2f}x)")
    print(f"  max |amplitude difference| = {drift:.2e}")


if __name__ == "__main__":
    main()
