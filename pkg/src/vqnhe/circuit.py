"""Parameterized circuits and their JSON serialization.

Bit ordering: bitstring s = s_0 s_1 ... s_{n-1} with qubit 0 leftmost,
basis index = sum_k s_k * 2**(n-1-k).  Qubit q therefore occupies bit
position n-1-q of the basis index.
"""

from dataclasses import dataclass, field
import json

import numpy as np

from .gates import GATE_KINDS, gate_matrix


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple
    param: int | None = None
    value: float | None = None
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity, parameterized = GATE_KINDS[self.kind]
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} expects {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"repeated qubit in {self.kind} gate: {self.qubits}")
        if parameterized:
            if (self.param is None) == (self.value is None):
                raise CircuitError(
                    f"{self.kind} carries either a param slot or a fixed value, not both"
                )
        else:
            if self.param is not None or self.value is not None:
                raise CircuitError(f"{self.kind} takes no parameter")
        if self.kind == "U2":
            m = self.matrix
            if m is None or m.shape != (2, 2):
                raise CircuitError("U2 requires a 2x2 matrix")
            if not np.allclose(m.conj().T @ m, np.eye(2), atol=1e-12):
                raise CircuitError("U2 matrix is not unitary")
        elif self.matrix is not None:
            raise CircuitError("only U2 gates carry an explicit matrix")


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple = ()
    n_params: int = 0
    initial: str = "zeros"

    def __post_init__(self):
        if self.n_qubits < 1:
            raise CircuitError("n_qubits must be positive")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for q in g.qubits:
                if not 0 <= q < self.n_qubits:
                    raise CircuitError(f"qubit index {q} out of range for n={self.n_qubits}")
            if g.param is not None and not 0 <= g.param < self.n_params:
                raise CircuitError(f"param slot {g.param} out of range for n_params={self.n_params}")
        init = self.initial
        if init not in ("zeros", "bell_pairs"):
            if len(init) != self.n_qubits or set(init) - {"0", "1"}:
                raise CircuitError(f"bad initial state spec {init!r}")
        if init == "bell_pairs" and self.n_qubits % 2:
            raise CircuitError("bell_pairs initial state needs an even qubit count")

    def initial_state(self):
        """Flat complex amplitude array of the initial state."""
        dim = 1 << self.n_qubits
        amp = np.zeros(dim, dtype=complex)
        if self.initial == "zeros":
            amp[0] = 1.0
        elif self.initial == "bell_pairs":
            # product of adjacent singlets (|01> - |10>)/sqrt(2) on (0,1),(2,3),...
            pair = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2.0)
            state = np.array([1.0])
            for _ in range(self.n_qubits // 2):
                state = np.kron(state, pair)
            amp[:] = state
        else:
            amp[int(self.initial, 2)] = 1.0
        return amp

    def to_dict(self):
        gates = []
        for g in self.gates:
            d = {"kind": g.kind, "qubits": list(g.qubits), "param": g.param, "value": g.value}
            if g.matrix is not None:
                d["matrix"] = [[[c.real, c.imag] for c in row] for row in g.matrix]
            gates.append(d)
        return {"n_qubits": self.n_qubits, "initial": self.initial,
                "n_params": self.n_params, "gates": gates}

    @classmethod
    def from_dict(cls, d):
        gates = []
        for gd in d["gates"]:
            matrix = None
            if gd.get("matrix") is not None:
                matrix = np.array([[complex(re, im) for re, im in row] for row in gd["matrix"]])
            gates.append(Gate(gd["kind"], tuple(gd["qubits"]), gd.get("param"),
                              gd.get("value"), matrix))
        return cls(d["n_qubits"], tuple(gates), d.get("n_params", 0), d.get("initial", "zeros"))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_json(fh.read())


def resolve_angle(gate, params, overrides=None, gate_index=None):
    if overrides is not None and gate_index in overrides:
        return overrides[gate_index]
    if gate.value is not None:
        return gate.value
    if gate.param is not None:
        return params[gate.param]
    return None


def dense_unitary(circuit, params=()):
    """Dense 2^n x 2^n unitary of the gate sequence (initial state excluded)."""
    n = circuit.n_qubits
    if n > 12:
        raise CircuitError("dense_unitary is limited to n <= 12")
    dim = 1 << n
    u = np.eye(dim, dtype=complex)
    for gi, g in enumerate(circuit.gates):
        angle = resolve_angle(g, params, None, gi)
        m = gate_matrix(g.kind, angle, g.matrix)
        full = _embed(m, g.qubits, n)
        u = full @ u
    return u


def _embed(m, qubits, n):
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    positions = [n - 1 - q for q in qubits]
    k = len(qubits)
    rest_mask = (dim - 1) & ~sum(1 << p for p in positions)
    rest = [i for i in range(dim) if i & ~rest_mask == 0]
    for base in rest:
        idx = []
        for sel in range(1 << k):
            i = base
            for j, p in enumerate(positions):
                if (sel >> (k - 1 - j)) & 1:
                    i |= 1 << p
            idx.append(i)
        for a in range(1 << k):
            for b in range(1 << k):
                out[idx[a], idx[b]] = m[a, b]
    return out
