import itertools

import numpy as np
import pytest

from vqnhe.circuit import Circuit, dense_unitary
from vqnhe.measure import (
    MeasurementError, build_v, build_v_prime, diagonal_plan, select_star,
    tilde_partner, verify_eigenbasis, z_sign, z_sign_table,
)
from vqnhe.pauli import PauliString, pauli_from_label
from vqnhe.statevector import apply_gates, run_circuit

from conftest import random_circuit, random_pauli


def all_nondiagonal_strings(n):
    for ops in itertools.product("IXYZ", repeat=n):
        p = PauliString(n, "".join(ops))
        if p.weight_xy:
            yield p


def test_select_star():
    assert select_star(pauli_from_label(5, "Y2 Z3 X4")) == 2
    assert select_star(pauli_from_label(4, "X1 X2 Y3")) == 1
    with pytest.raises(MeasurementError):
        select_star(pauli_from_label(2, "Z0 Z1"))


def test_build_v_structure():
    plan = build_v(pauli_from_label(1, "X0"))
    assert [g.kind for g in plan.appended.gates] == ["H"]

    plan = build_v(pauli_from_label(5, "Y2 Z3 X4"))
    kinds = [(g.kind, g.qubits) for g in plan.appended.gates]
    assert ("CX", (2, 4)) in kinds
    assert not any(3 in g.qubits for g in plan.appended.gates)  # CZ omitted
    star_gate = plan.appended.gates[-1]
    assert star_gate.kind == "RX" and star_gate.qubits == (2,)
    assert star_gate.value == -np.pi / 4
    assert plan.z_qubits == frozenset({3})
    assert plan.flip_qubits == frozenset({4})

    plan = build_v(pauli_from_label(4, "X1 X2 Y3"))
    kinds = [(g.kind, g.qubits) for g in plan.appended.gates]
    assert ("CX", (1, 2)) in kinds and ("CY", (1, 3)) in kinds
    assert plan.appended.gates[-1].kind == "H"
    assert plan.appended.gates[-1].qubits == (1,)


def test_build_v_prime_structure():
    plan = build_v_prime(pauli_from_label(1, "X0"))
    g = plan.appended.gates[-1]
    assert g.kind == "RX" and g.value == np.pi / 4
    plan = build_v_prime(pauli_from_label(1, "Y0"))
    assert plan.appended.gates[-1].kind == "H"
    # controlled layer identical to V's
    p = pauli_from_label(2, "X0 Y1")
    v, vp = build_v(p), build_v_prime(p)
    assert v.appended.gates[:-1] == vp.appended.gates[:-1]


def test_gate_count_bound(rng):
    for _ in range(50):
        p = random_pauli(rng, 5, allow_diagonal=False)
        plan = build_v(p)
        two_q = sum(len(g.qubits) == 2 for g in plan.appended.gates)
        assert two_q == p.weight_xy - 1
        assert sum(len(g.qubits) == 1 for g in plan.appended.gates) == 1


def test_plan_partition(rng):
    for _ in range(20):
        p = random_pauli(rng, 4, allow_diagonal=False)
        plan = build_v(p)
        assert plan.flip_qubits | {plan.star} | plan.z_qubits == p.support
        assert plan.star not in plan.flip_qubits
        assert not plan.z_qubits & (plan.flip_qubits | {plan.star})


def test_tilde_partner():
    plan = build_v(pauli_from_label(1, "X0"))
    assert tilde_partner(plan, "0") == "1"
    plan = build_v(pauli_from_label(5, "Y2 Z3 X4"))
    assert tilde_partner(plan, "00000") == "00101"
    for s in ("01011", "11111"):
        assert tilde_partner(plan, tilde_partner(plan, s)) == s


def test_z_sign():
    plan = build_v(pauli_from_label(2, "X0 Y1"))
    assert all(z_sign(plan, s) == 1 for s in ("00", "01", "10", "11"))
    plan = build_v(pauli_from_label(5, "Y2 Z3 X4"))
    assert z_sign(plan, "00010") == -1
    assert z_sign(plan, "00000") == 1
    p2 = build_v(pauli_from_label(4, "X0 Z1 Z2"))
    assert z_sign(p2, "0110") == 1  # two Z bits set


def test_z_sign_table_consistency(rng):
    for _ in range(10):
        p = random_pauli(rng, 4, allow_diagonal=False)
        plan = build_v(p)
        tbl = z_sign_table(plan)
        for idx in range(16):
            assert tbl[idx] == z_sign(plan, format(idx, "04b"))


def test_verify_eigenbasis_x0():
    assert verify_eigenbasis(build_v(pauli_from_label(1, "X0"))) <= 1e-12


def test_verify_eigenbasis_exhaustive_3q():
    for p in all_nondiagonal_strings(3):
        assert verify_eigenbasis(build_v(p)) <= 1e-10, p.ops
        assert verify_eigenbasis(build_v_prime(p)) <= 1e-10, p.ops


def test_verify_eigenbasis_fig_example():
    p = pauli_from_label(5, "Y2 Z3 X4")
    assert verify_eigenbasis(build_v(p)) <= 1e-10
    assert verify_eigenbasis(build_v_prime(p)) <= 1e-10


def test_verify_with_physical_cz():
    p = pauli_from_label(5, "Y2 Z3 X4")
    assert verify_eigenbasis(build_v(p, include_cz=True)) <= 1e-10


def test_eigenbasis_orthonormal():
    p = pauli_from_label(3, "X0 Y1 Z2")
    u = dense_unitary(build_v(p).appended)
    assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-10)


def test_probability_partition(rng):
    # paired outcomes of V carry the same total probability as the pair
    # of computational outcomes they rotate
    for _ in range(10):
        p = random_pauli(rng, 4, allow_diagonal=False)
        plan = build_v(p)
        c = random_circuit(rng, 4, depth=2, parameterized=False)
        psi = run_circuit(c).amplitudes
        amp = psi.copy()
        apply_gates(plan.appended, amp)
        probs_v = np.abs(amp) ** 2
        star = plan.star_mask()
        pair = star | plan.flip_mask()
        for a in range(16):
            if a & star:
                continue
            b = a ^ pair
            lhs = probs_v[a] + probs_v[a | star]
            rhs = abs(psi[a]) ** 2 + abs(psi[b]) ** 2
            assert abs(lhs - rhs) <= 1e-10


def test_diagonal_plan():
    p = pauli_from_label(3, "Z0 Z2")
    plan = diagonal_plan(p)
    assert plan.mode == "diagonal"
    assert plan.appended.gates == ()
    assert plan.z_qubits == frozenset({0, 2})
    with pytest.raises(MeasurementError):
        diagonal_plan(pauli_from_label(2, "X0"))


def test_plan_serializable():
    plan = build_v(pauli_from_label(5, "Y2 Z3 X4"))
    again = Circuit.from_json(plan.appended.to_json())
    assert again == plan.appended
