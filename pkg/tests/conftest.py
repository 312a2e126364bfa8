import numpy as np
import pytest

from vqnhe.circuit import Circuit, Gate
from vqnhe.pauli import Hamiltonian, PauliString, PauliTerm


def random_circuit(rng, n, depth=2, parameterized=True):
    """Layered random circuit mixing every gate kind."""
    gates = [Gate("H", (i,)) for i in range(n)]
    slot = 0
    for _ in range(depth):
        for i in range(n):
            kind = rng.choice(["RX", "RZ"])
            if parameterized:
                gates.append(Gate(kind, (i,), param=slot))
                slot += 1
            else:
                gates.append(Gate(kind, (i,), value=float(rng.normal(0, 0.7))))
        for i in range(n - 1):
            kind = rng.choice(["CX", "CZ", "EXP_ZZ", "EXP_SWAP"])
            if kind in ("EXP_ZZ", "EXP_SWAP"):
                gates.append(Gate(kind, (i, i + 1), value=float(rng.normal(0, 0.7))))
            else:
                gates.append(Gate(kind, (i, i + 1)))
    return Circuit(n, tuple(gates), n_params=slot)


def random_pauli(rng, n, allow_diagonal=True):
    while True:
        ops = "".join(rng.choice(list("IXYZ"), size=n))
        if ops == "I" * n:
            continue
        if not allow_diagonal and not set(ops) & {"X", "Y"}:
            continue
        return PauliString(n, ops)


def random_hamiltonian(rng, n, n_terms=5, allow_diagonal=True):
    terms = tuple(
        PauliTerm(float(rng.normal()), random_pauli(rng, n, allow_diagonal))
        for _ in range(n_terms)
    )
    return Hamiltonian(n, terms)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
