"""Measurement-circuit synthesis for Pauli strings.

For a string with X/Y weight m, the appended circuit V consists of m-1
controlled gates (CZ gates omitted by default, their sign tracked
classically) plus one basis-change gate on the star qubit.  V rotates
the string's eigenbasis into the computational basis; V' does the same
for the phase-shifted companion basis used with complex post-processing.
"""

from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate
from .pauli import PauliError, phase_table
from .statevector import apply_gates

REAL_PART = "real_part"
IMAG_PART = "imag_part"
DIAGONAL = "diagonal"


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True)
class MeasurementPlan:
    pauli: object
    star: int | None
    appended: Circuit
    z_qubits: frozenset
    flip_qubits: frozenset
    mode: str
    includes_cz: bool = False

    @property
    def n_qubits(self):
        return self.pauli.n_qubits

    def star_mask(self):
        return 1 << (self.n_qubits - 1 - self.star)

    def flip_mask(self):
        return sum(1 << (self.n_qubits - 1 - q) for q in self.flip_qubits)

    def z_mask(self):
        return sum(1 << (self.n_qubits - 1 - q) for q in self.z_qubits)


def select_star(p):
    """Lowest-index qubit of p carrying X or Y."""
    for q, c in enumerate(p.ops):
        if c in "XY":
            return q
    raise MeasurementError(f"diagonal string {p.ops!r} has no star qubit")


def _build(p, mode, include_cz):
    star = select_star(p)
    gates = []
    z_qubits = set()
    flip_qubits = set()
    for q, c in enumerate(p.ops):
        if q == star or c == "I":
            continue
        if c == "X":
            gates.append(Gate("CX", (star, q)))
            flip_qubits.add(q)
        elif c == "Y":
            gates.append(Gate("CY", (star, q)))
            flip_qubits.add(q)
        else:
            z_qubits.add(q)
            if include_cz:
                gates.append(Gate("CZ", (star, q)))
    star_op = p.ops[star]
    if mode == REAL_PART:
        star_gate = Gate("H", (star,)) if star_op == "X" else Gate("RX", (star,), value=-np.pi / 4)
    else:
        star_gate = Gate("RX", (star,), value=np.pi / 4) if star_op == "X" else Gate("H", (star,))
    gates.append(star_gate)
    appended = Circuit(p.n_qubits, tuple(gates))
    return MeasurementPlan(p, star, appended, frozenset(z_qubits),
                           frozenset(flip_qubits), mode, include_cz)


def build_v(p, include_cz=False):
    """Measurement circuit for the real-part estimator."""
    return _build(p, REAL_PART, include_cz)


def build_v_prime(p, include_cz=False):
    """Companion circuit for the imaginary-part estimator (complex f)."""
    return _build(p, IMAG_PART, include_cz)


def diagonal_plan(p):
    if not p.is_diagonal:
        raise MeasurementError(f"{p.ops!r} is not diagonal")
    return MeasurementPlan(p, None, Circuit(p.n_qubits), frozenset(p.support),
                           frozenset(), DIAGONAL)


def tilde_partner(plan, s):
    """Flip the star bit and every flip-qubit bit of s."""
    if len(s) != plan.n_qubits:
        raise MeasurementError("bitstring length mismatch")
    flip = set(plan.flip_qubits) | {plan.star}
    return "".join("1" if (b == "0") == (q in flip) else "0" for q, b in enumerate(s))


def z_sign(plan, s):
    """Classical sign of the omitted CZ gates: prod over Z qubits of (1-2s_j)."""
    if len(s) != plan.n_qubits:
        raise MeasurementError("bitstring length mismatch")
    if plan.includes_cz:
        return 1
    sign = 1
    for q in plan.z_qubits:
        if s[q] == "1":
            sign = -sign
    return sign


def z_sign_table(plan):
    """z_sign over all basis indices (all +1 when CZ gates are physical)."""
    dim = 1 << plan.n_qubits
    if plan.includes_cz:
        return np.ones(dim)
    idx = np.arange(dim)
    mask = plan.z_mask()
    parity = np.zeros(dim, dtype=np.int64)
    v = idx & mask
    while mask:
        parity ^= v & 1
        v >>= 1
        mask >>= 1
    return np.where(parity, -1.0, 1.0)


def verify_eigenbasis(plan, n_samples=1000, seed=0):
    """Max deviation of V^dagger|s> from the expected eigenbasis ray.

    Checks every outcome exhaustively for n <= 6 and ``n_samples`` random
    outcomes otherwise.  The omitted-CZ sign correction is applied to the
    expected vector; global phase per outcome is factored out.
    """
    n = plan.n_qubits
    if n > 10:
        raise MeasurementError("verify_eigenbasis guarded at n <= 10")
    if plan.mode == DIAGONAL:
        return 0.0
    dim = 1 << n
    star_bit = plan.star_mask()
    pair_mask = star_bit | plan.flip_mask()
    phases = phase_table(plan.pauli)
    zs = z_sign_table(plan)
    if n <= 6:
        outcomes = range(dim)
    else:
        rng = np.random.default_rng(seed)
        outcomes = rng.integers(0, dim, size=n_samples)
    max_dev = 0.0
    for m in outcomes:
        m = int(m)
        vec = np.zeros(dim, dtype=complex)
        vec[m] = 1.0
        apply_gates(plan.appended, vec, adjoint=True)
        a = m & ~star_bit
        b = a ^ pair_mask
        sign = -1.0 if m & star_bit else 1.0
        expected = np.zeros(dim, dtype=complex)
        expected[a] += 1.0
        if plan.mode == REAL_PART:
            expected[b] += sign * zs[a] * phases[a]
        else:
            expected[a] *= -1j
            expected[b] += -sign * zs[a] * phases[a]
        expected /= np.linalg.norm(expected)
        overlap = np.vdot(expected, vec)
        aligned = vec * np.exp(-1j * np.angle(overlap)) if abs(overlap) > 0 else vec
        dev = float(np.linalg.norm(aligned - expected))
        max_dev = max(max_dev, dev)
    return max_dev
