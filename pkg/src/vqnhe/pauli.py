"""Pauli-string algebra, Hamiltonians, model builders and dense oracles.

Phase convention: apply_to_basis(P, s) returns (s~, phase) with
P|s> = phase * |s~> under the standard single-qubit matrices
(X|0>=|1>, Y|0>=i|1>, Y|1>=-i|0>, Z|1>=-|1>).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla

from .gates import X_MAT, Y_MAT, Z_MAT
from .statevector import Statevector

_SINGLE = {"I": np.eye(2, dtype=complex), "X": X_MAT, "Y": Y_MAT, "Z": Z_MAT}

DENSE_GUARD = 14
COEFF_EPS = 1e-12


class PauliError(ValueError):
    pass


@dataclass(frozen=True)
class PauliString:
    n_qubits: int
    ops: str

    def __post_init__(self):
        if len(self.ops) != self.n_qubits:
            raise PauliError(f"ops length {len(self.ops)} != n_qubits {self.n_qubits}")
        if set(self.ops) - set("IXYZ"):
            raise PauliError(f"invalid Pauli codes in {self.ops!r}")

    @property
    def weight_xy(self):
        return sum(c in "XY" for c in self.ops)

    @property
    def is_diagonal(self):
        return self.weight_xy == 0

    @property
    def support(self):
        return frozenset(q for q, c in enumerate(self.ops) if c != "I")

    def mask(self, codes):
        """Basis-index bitmask of qubits whose code is in ``codes``."""
        m = 0
        for q, c in enumerate(self.ops):
            if c in codes:
                m |= 1 << (self.n_qubits - 1 - q)
        return m

    def label(self):
        parts = [f"{c}{q}" for q, c in enumerate(self.ops) if c != "I"]
        return " ".join(parts) if parts else "I"

    def dense_matrix(self):
        m = np.array([[1.0 + 0j]])
        for c in self.ops:
            m = np.kron(m, _SINGLE[c])
        return m


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    string: PauliString

    def __post_init__(self):
        if not np.isfinite(self.coeff):
            raise PauliError("coefficient must be finite")


@dataclass(frozen=True)
class BasisAction:
    out_bits: str
    phase: complex


def pauli_from_label(n_qubits, label):
    """Parse labels like "X0 Y1 Z3" (or "I" for identity)."""
    ops = ["I"] * n_qubits
    label = label.strip()
    if label and label != "I":
        for token in label.split():
            code, q = token[0].upper(), token[1:]
            if code not in "XYZ" or not q.isdigit():
                raise PauliError(f"malformed Pauli token {token!r}")
            q = int(q)
            if q >= n_qubits:
                raise PauliError(f"qubit index {q} >= n_qubits {n_qubits}")
            if ops[q] != "I":
                raise PauliError(f"duplicate qubit {q} in term {label!r}")
            ops[q] = code
    return PauliString(n_qubits, "".join(ops))


def apply_to_basis(p, s):
    """Return BasisAction(s~, phase) with P|s> = phase * |s~>."""
    if len(s) != p.n_qubits:
        raise PauliError(f"bitstring length {len(s)} != n_qubits {p.n_qubits}")
    out = []
    phase = 1 + 0j
    for c, b in zip(p.ops, s):
        if c == "I":
            out.append(b)
        elif c == "X":
            out.append("1" if b == "0" else "0")
        elif c == "Y":
            out.append("1" if b == "0" else "0")
            phase *= 1j if b == "0" else -1j
        else:
            out.append(b)
            if b == "1":
                phase *= -1
    return BasisAction("".join(out), phase)


def phase_table(p):
    """phase(s) over all basis indices s, input-indexed as in apply_to_basis."""
    n = p.n_qubits
    idx = np.arange(1 << n)
    yz = p.mask("YZ")
    parity = np.zeros(idx.size, dtype=np.int64)
    v = idx & yz
    while yz:
        parity ^= v & 1
        v >>= 1
        yz >>= 1
    n_y = sum(c == "Y" for c in p.ops)
    return (1j) ** n_y * np.where(parity, -1.0, 1.0)


@dataclass(frozen=True)
class Hamiltonian:
    n_qubits: int
    terms: tuple

    def __post_init__(self):
        merged = {}
        for t in self.terms:
            if t.string.n_qubits != self.n_qubits:
                raise PauliError("term qubit count mismatch")
            merged[t.string.ops] = merged.get(t.string.ops, 0.0) + t.coeff
        out = tuple(
            PauliTerm(c, PauliString(self.n_qubits, ops))
            for ops, c in merged.items()
            if abs(c) >= COEFF_EPS
        )
        object.__setattr__(self, "terms", out)

    def term_tables(self):
        """Per-term (coeff, xor_mask, phase array) for fast vector application."""
        cached = getattr(self, "_tables", None)
        if cached is None:
            cached = [
                (t.coeff, t.string.mask("XY"), phase_table(t.string))
                for t in self.terms
            ]
            object.__setattr__(self, "_tables", cached)
        return cached

    def apply(self, vec, tables=None):
        """H @ vec for a flat complex array over the basis."""
        if tables is None:
            tables = self.term_tables()
        idx = np.arange(vec.size)
        out = np.zeros_like(vec)
        pv = np.empty_like(vec)
        for coeff, mask, phase in tables:
            np.multiply(phase, vec, out=pv)
            if mask:
                out += coeff * pv[idx ^ mask]
            else:
                out += coeff * pv
        return out


def build_tfim(n, boundary="periodic"):
    """H = sum ZZ on bonds - sum X, per the 1D transverse-field Ising chain."""
    _check_bonds(n, boundary)
    terms = []
    for i, j in _bonds(n, boundary):
        ops = ["I"] * n
        ops[i] = ops[j] = "Z"
        terms.append(PauliTerm(1.0, PauliString(n, "".join(ops))))
    for i in range(n):
        ops = ["I"] * n
        ops[i] = "X"
        terms.append(PauliTerm(-1.0, PauliString(n, "".join(ops))))
    return Hamiltonian(n, tuple(terms))


def build_heisenberg(n, boundary="periodic"):
    """H = sum (XX + YY + ZZ) on bonds."""
    _check_bonds(n, boundary)
    terms = []
    for i, j in _bonds(n, boundary):
        for c in "XYZ":
            ops = ["I"] * n
            ops[i] = ops[j] = c
            terms.append(PauliTerm(1.0, PauliString(n, "".join(ops))))
    return Hamiltonian(n, tuple(terms))


def _bonds(n, boundary):
    if boundary == "periodic":
        return [(i, (i + 1) % n) for i in range(n)]
    return [(i, i + 1) for i in range(n - 1)]


def _check_bonds(n, boundary):
    if boundary not in ("periodic", "open"):
        raise PauliError(f"unknown boundary {boundary!r}")
    if n < 2 or (boundary == "periodic" and n < 3):
        raise PauliError(f"chain of {n} sites too small for {boundary} boundary")


def parse_hamiltonian(text):
    """Line format: first non-comment line is n_qubits; then '<coeff> <OPq>...'."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise PauliError("empty Hamiltonian text")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise PauliError(f"bad n_qubits line {lines[0]!r}") from exc
    terms = []
    for ln in lines[1:]:
        fields = ln.split()
        try:
            coeff = float(fields[0])
        except ValueError as exc:
            raise PauliError(f"bad coefficient in line {ln!r}") from exc
        if not np.isfinite(coeff):
            raise PauliError(f"non-finite coefficient in line {ln!r}")
        string = pauli_from_label(n, " ".join(fields[1:]))
        terms.append(PauliTerm(coeff, string))
    return Hamiltonian(n, tuple(terms))


def serialize_hamiltonian(h):
    lines = [str(h.n_qubits)]
    for t in h.terms:
        label = t.string.label()
        lines.append(f"{t.coeff!r}" if label == "I" else f"{t.coeff!r} {label}")
    return "\n".join(lines) + "\n"


def hamiltonian_to_json_dict(h):
    return {
        "n_qubits": h.n_qubits,
        "terms": [{"coeff": t.coeff, "ops": t.string.label()} for t in h.terms],
    }


def hamiltonian_from_json_dict(d):
    n = d["n_qubits"]
    terms = tuple(
        PauliTerm(float(t["coeff"]), pauli_from_label(n, t["ops"])) for t in d["terms"]
    )
    return Hamiltonian(n, terms)


def dense_matrix(h):
    if h.n_qubits > DENSE_GUARD:
        raise PauliError(f"dense_matrix guarded at n <= {DENSE_GUARD}")
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        out += t.coeff * t.string.dense_matrix()
    return out


def exact_ground(h):
    """Minimal eigenvalue and eigenvector; sparse Lanczos above 6 qubits."""
    if h.n_qubits > DENSE_GUARD:
        raise PauliError(f"exact_ground guarded at n <= {DENSE_GUARD}")
    dim = 1 << h.n_qubits
    if h.n_qubits <= 6:
        mat = dense_matrix(h)
        vals, vecs = np.linalg.eigh(mat)
        energy, vec = vals[0], vecs[:, 0]
    else:
        tables = h.term_tables()
        op = spla.LinearOperator(
            (dim, dim), matvec=lambda v: h.apply(v.astype(complex), tables)
        )
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        vals, vecs = spla.eigsh(op, k=1, which="SA", v0=v0, tol=0)
        energy, vec = vals[0], vecs[:, 0]
    vec = vec / np.linalg.norm(vec)
    return float(energy), Statevector(h.n_qubits, vec)
