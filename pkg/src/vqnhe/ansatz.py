"""Circuit families used in the spin-model and molecular benchmarks."""

from .circuit import Circuit, CircuitError, Gate


def tfim_qaoa(n, p):
    """Multi-parameter QAOA-style ansatz: H layer, then p blocks of
    periodic EXP_ZZ bonds followed by per-qubit RX; 2np parameters."""
    if n < 3:
        raise CircuitError("tfim_qaoa needs n >= 3")
    gates = [Gate("H", (i,)) for i in range(n)]
    slot = 0
    for _ in range(p):
        for i in range(n):
            gates.append(Gate("EXP_ZZ", (i, (i + 1) % n), param=slot))
            slot += 1
        for i in range(n):
            gates.append(Gate("RX", (i,), param=slot))
            slot += 1
    return Circuit(n, tuple(gates), n_params=slot)


def heisenberg_swap(n, p):
    """Parameterized swap network on a product of adjacent singlet pairs;
    np parameters, SU(2)-symmetric."""
    if n < 4 or n % 2:
        raise CircuitError("heisenberg_swap needs even n >= 4")
    gates = []
    slot = 0
    for _ in range(p):
        for i in range(n):
            gates.append(Gate("EXP_SWAP", (i, (i + 1) % n), param=slot))
            slot += 1
    return Circuit(n, tuple(gates), n_params=slot, initial="bell_pairs")


def hardware_efficient(n, depth, init_bits=None):
    """Blocks of [RX layer, RZ layer, ascending CNOT ladder] on a product
    initial state; 2n*depth parameters."""
    if n < 2 or depth < 1:
        raise CircuitError("hardware_efficient needs n >= 2 and depth >= 1")
    if init_bits is None:
        init_bits = "0" * n
    if len(init_bits) != n or set(init_bits) - {"0", "1"}:
        raise CircuitError(f"bad init bits {init_bits!r}")
    gates = []
    slot = 0
    for _ in range(depth):
        for i in range(n):
            gates.append(Gate("RX", (i,), param=slot))
            slot += 1
        for i in range(n):
            gates.append(Gate("RZ", (i,), param=slot))
            slot += 1
        for i in range(n - 1):
            gates.append(Gate("CX", (i, i + 1)))
    return Circuit(n, tuple(gates), n_params=slot, initial=init_bits)


def tfim5_supp(n):
    """Shallow open-chain circuit for the small-TFIM benchmark: H layer,
    one layer of open-bond EXP_ZZ gates, one RX layer; 2n-1 parameters."""
    if n < 2:
        raise CircuitError("tfim5_supp needs n >= 2")
    gates = [Gate("H", (i,)) for i in range(n)]
    slot = 0
    for i in range(n - 1):
        gates.append(Gate("EXP_ZZ", (i, i + 1), param=slot))
        slot += 1
    for i in range(n):
        gates.append(Gate("RX", (i,), param=slot))
        slot += 1
    return Circuit(n, tuple(gates), n_params=slot)


def build_ansatz(family, n, p=None, depth=None, init_bits=None):
    if family == "tfim_qaoa":
        return tfim_qaoa(n, p)
    if family == "heisenberg_swap":
        return heisenberg_swap(n, p)
    if family == "hardware_efficient":
        return hardware_efficient(n, depth if depth is not None else p, init_bits)
    if family == "tfim5_supp":
        return tfim5_supp(n)
    raise CircuitError(f"unknown ansatz family {family!r}")
