"""Dense statevector simulation: running circuits, sampling, overlaps."""

from dataclasses import dataclass

import numpy as np

from .backend import kernels
from .circuit import CircuitError, resolve_angle
from .gates import exp_zz_diag, gate_matrix

NORM_TOL = 1e-10


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class Statevector:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.ascontiguousarray(self.amplitudes, dtype=complex)
        if amp.size != 1 << self.n_qubits:
            raise SimulationError(
                f"amplitude length {amp.size} != 2**{self.n_qubits}"
            )
        amp.flags.writeable = False
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def bitstring(self, index):
        return format(index, f"0{self.n_qubits}b")


def bitstring_index(s):
    return int(s, 2)


def run_circuit(circuit, params=(), overrides=None):
    """Evaluate the circuit on its initial state.

    ``overrides`` optionally maps gate index -> angle, used by the
    parameter-shift rule to shift a single gate occurrence.
    """
    params = np.asarray(params, dtype=float)
    if params.size != circuit.n_params:
        raise SimulationError(
            f"expected {circuit.n_params} parameters, got {params.size}"
        )
    amp = circuit.initial_state()
    apply_gates(circuit, amp, params, overrides)
    drift = abs(np.linalg.norm(amp) - 1.0)
    if drift > NORM_TOL:
        raise SimulationError(f"norm drift {drift:.2e} exceeds tolerance")
    return Statevector(circuit.n_qubits, amp)


def apply_gates(circuit, amp, params=(), overrides=None, adjoint=False):
    """Apply the circuit's gates in place to a flat amplitude array."""
    n = circuit.n_qubits
    order = range(len(circuit.gates))
    if adjoint:
        order = reversed(order)
    for gi in order:
        g = circuit.gates[gi]
        angle = resolve_angle(g, params, overrides, gi)
        apply_gate(g, amp, n, angle, adjoint)


def apply_gate(g, amp, n, angle=None, adjoint=False):
    """Apply one gate (or its adjoint) in place."""
    if g.kind == "EXP_ZZ":
        pa, pb = (n - 1 - q for q in g.qubits)
        diag = exp_zz_diag(-angle if adjoint else angle)
        kernels.apply_diag_2q(amp, diag, pa, pb)
        return
    m = gate_matrix(g.kind, angle, g.matrix)
    if adjoint:
        m = m.conj().T
    if len(g.qubits) == 1:
        kernels.apply_1q(amp, np.ascontiguousarray(m), n - 1 - g.qubits[0])
    else:
        pa, pb = (n - 1 - q for q in g.qubits)
        kernels.apply_2q(amp, np.ascontiguousarray(m), pa, pb)


@dataclass(frozen=True)
class SampleBatch:
    n_qubits: int
    counts: dict
    total_shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.total_shots:
            raise SimulationError("counts do not sum to total_shots")

    def index_counts(self):
        """(indices, counts) integer arrays, sorted by basis index."""
        items = sorted((bitstring_index(s), c) for s, c in self.counts.items())
        idx = np.array([i for i, _ in items], dtype=np.int64)
        cnt = np.array([c for _, c in items], dtype=np.int64)
        return idx, cnt


def sample(state, shots, seed):
    """Draw i.i.d. computational-basis shots; deterministic under a fixed seed."""
    if shots < 1:
        raise SimulationError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = state.probabilities()
    p = p / p.sum()
    raw = rng.multinomial(shots, p)
    nz = np.nonzero(raw)[0]
    counts = {state.bitstring(int(i)): int(raw[i]) for i in nz}
    return SampleBatch(state.n_qubits, counts, shots)


def exact_distribution(state):
    """Map bitstring -> probability over the full basis."""
    p = state.probabilities()
    return {state.bitstring(i): float(p[i]) for i in range(p.size)}


def inner_product(a, b):
    if a.n_qubits != b.n_qubits:
        raise SimulationError("inner_product requires matching qubit counts")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
