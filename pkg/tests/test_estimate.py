import numpy as np
import pytest

from vqnhe.circuit import Circuit, Gate
from vqnhe.estimate import (
    EstimationError, ShotPlan, denominator_estimate, diagonal_term_estimate,
    estimate_energy, exact_energy, offdiagonal_term_estimate, shot_bound,
    stderr_bound,
)
from vqnhe.measure import build_v
from vqnhe.pauli import (
    Hamiltonian, PauliTerm, build_heisenberg, build_tfim, dense_matrix,
    exact_ground, pauli_from_label,
)
from vqnhe.postproc import GatedMlp, Rbm, TablePostprocessor
from vqnhe.statevector import apply_gates, run_circuit, sample

from conftest import random_circuit, random_hamiltonian


def identity_post(n):
    return TablePostprocessor(n, np.ones(1 << n))


def test_shot_plan():
    plan = ShotPlan.uniform(3, 100)
    assert plan.total == 400
    with pytest.raises(EstimationError):
        ShotPlan((0, 5), 5)


def test_shot_bound():
    assert shot_bound(1.0, 0.015) == 10000
    assert shot_bound(1.0, 1.5) == 1
    assert shot_bound(np.e, 0.01) == 1228459
    with pytest.raises(EstimationError):
        shot_bound(0.5, 0.1)


def test_stderr_bound():
    assert stderr_bound(1.0, 9) == 0.5
    assert np.isclose(stderr_bound(1.0, 4 * 9), 0.25)


def test_exact_energy_identity_post(rng):
    c = random_circuit(rng, 4, depth=2, parameterized=False)
    h = random_hamiltonian(rng, 4, 6)
    psi = run_circuit(c).amplitudes
    plain = float(np.vdot(psi, dense_matrix(h) @ psi).real)
    assert abs(exact_energy(c, (), identity_post(4), h) - plain) <= 1e-12


def test_exact_energy_projector_limit():
    c = Circuit(1, (Gate("H", (0,)),))
    post = TablePostprocessor(1, [1.0, 0.0])
    h = Hamiltonian(1, (PauliTerm(1.0, pauli_from_label(1, "Z0")),))
    assert abs(exact_energy(c, (), post, h) - 1.0) <= 1e-12


def test_exact_energy_dense_oracle(rng):
    for _ in range(10):
        c = random_circuit(rng, 4, depth=2, parameterized=False)
        h = random_hamiltonian(rng, 4, 6)
        tbl = rng.normal(0, 0.5, 16) + 1j * rng.normal(0, 0.5, 16) + 1.2
        post = TablePostprocessor(4, tbl)
        u = tbl * run_circuit(c).amplitudes
        oracle = float((np.vdot(u, dense_matrix(h) @ u) / np.vdot(u, u)).real)
        assert abs(exact_energy(c, (), post, h) - oracle) <= 1e-12


def test_exact_energy_lower_bound(rng):
    h = random_hamiltonian(rng, 4, 6)
    e0, _ = exact_ground(h)
    for _ in range(10):
        c = random_circuit(rng, 4, depth=1, parameterized=False)
        tbl = rng.normal(0, 0.5, 16) + 1.2
        assert exact_energy(c, (), TablePostprocessor(4, tbl), h) >= e0 - 1e-9


def test_exact_energy_zero_norm():
    c = Circuit(2)
    post = TablePostprocessor(2, [0.0, 1.0, 1.0, 1.0])  # kills |00>
    h = build_tfim(2, "open")
    with pytest.raises(EstimationError):
        exact_energy(c, (), post, h)


def test_denominator_estimate(rng):
    state = run_circuit(random_circuit(rng, 3, depth=1, parameterized=False))
    batch = sample(state, 2000, seed=1)
    val, err = denominator_estimate(batch, identity_post(3))
    assert val == 1.0 and err == 0.0
    # deterministic state
    c = Circuit(2, initial="10")
    tbl = rng.normal(0, 1, 4) + 2.0
    batch = sample(run_circuit(c), 100, seed=2)
    val, _ = denominator_estimate(batch, TablePostprocessor(2, tbl))
    assert np.isclose(val, abs(tbl[2]) ** 2)
    # uniform state: converges to the average
    c = Circuit(2, (Gate("H", (0,)), Gate("H", (1,))))
    post = TablePostprocessor(2, tbl)
    batch = sample(run_circuit(c), 10 ** 6, seed=3)
    val, err = denominator_estimate(batch, post)
    assert abs(val - np.mean(np.abs(tbl) ** 2)) <= 5 * err


def test_diagonal_term_estimate():
    c = Circuit(1, initial="1")
    batch = sample(run_circuit(c), 100, seed=0)
    term = PauliTerm(1.0, pauli_from_label(1, "Z0"))
    assert diagonal_term_estimate(batch, identity_post(1), term) == -1.0
    ident = PauliTerm(2.5, pauli_from_label(1, ""))
    assert diagonal_term_estimate(batch, identity_post(1), ident) == 2.5
    with pytest.raises(EstimationError):
        diagonal_term_estimate(batch, identity_post(1),
                               PauliTerm(1.0, pauli_from_label(1, "X0")))


def test_offdiagonal_term_estimate():
    # X0 on |+>: after H, outcome 0 with certainty -> estimator +1
    c = Circuit(1, (Gate("H", (0,)),))
    term = PauliTerm(1.0, pauli_from_label(1, "X0"))
    plan = build_v(term.string)
    amp = run_circuit(c).amplitudes.copy()
    apply_gates(plan.appended, amp)
    from vqnhe.statevector import Statevector
    batch = sample(Statevector(1, amp), 500, seed=1)
    val = offdiagonal_term_estimate(batch, identity_post(1), plan, term)
    assert abs(val - 1.0) <= 1e-12
    # X0 on |0>: symmetric outcomes, zero mean at large shots
    c = Circuit(1)
    amp = run_circuit(c).amplitudes.copy()
    apply_gates(plan.appended, amp)
    batch = sample(Statevector(1, amp), 10 ** 6, seed=2)
    val = offdiagonal_term_estimate(batch, identity_post(1), plan, term)
    assert abs(val) <= 5e-3
    with pytest.raises(EstimationError):
        wrong = build_v(pauli_from_label(1, "Y0"))
        offdiagonal_term_estimate(batch, identity_post(1), wrong, term)


def test_infinite_shot_equals_exact(rng):
    for trial in range(50):
        n = int(rng.integers(2, 5))
        c = random_circuit(rng, n, depth=2, parameterized=False)
        h = random_hamiltonian(rng, n, 5)
        tbl = rng.normal(0, 0.5, 1 << n) + 1j * rng.normal(0, 0.5, 1 << n) + 1.3
        post = TablePostprocessor(n, tbl)
        ex = exact_energy(c, (), post, h)
        res = estimate_energy(c, (), post, h, mode="infinite_shot")
        assert abs(res.value - ex) <= 1e-10
        assert res.stderr == 0.0


def test_singlet_energy_exact():
    c = Circuit(2, initial="bell_pairs")
    h = build_heisenberg(2, "open")
    res = estimate_energy(c, (), identity_post(2), h, mode="infinite_shot")
    assert abs(res.value + 3.0) <= 1e-12


def test_sampled_f1_reduction(rng):
    h = build_tfim(4, "periodic")
    c = random_circuit(rng, 4, depth=1, parameterized=False)
    psi = run_circuit(c).amplitudes
    plain = float(np.vdot(psi, dense_matrix(h) @ psi).real)
    res = estimate_energy(c, (), identity_post(4), h, shot_plan=10 ** 5,
                          seed=5, mode="sampled")
    assert abs(res.value - plain) <= 5 * max(res.stderr, 1e-4)
    assert res.shots_used == 10 ** 5 * (len(h.terms) + 1)


def test_dual_path_cz(rng):
    c = random_circuit(rng, 4, depth=2, parameterized=False)
    h = random_hamiltonian(rng, 4, 6, allow_diagonal=False)
    tbl = rng.normal(0, 0.5, 16) + 1j * rng.normal(0, 0.5, 16) + 1.3
    post = TablePostprocessor(4, tbl)
    a = estimate_energy(c, (), post, h, mode="infinite_shot", include_cz=False)
    b = estimate_energy(c, (), post, h, mode="infinite_shot", include_cz=True)
    assert abs(a.value - b.value) <= 1e-12


def test_complex_post_needs_v_prime(rng):
    # a complex f whose energy is wrong if the imaginary batch is skipped
    c = random_circuit(rng, 3, depth=2, parameterized=False)
    h = random_hamiltonian(rng, 3, 4, allow_diagonal=False)
    tbl = rng.normal(0, 0.5, 8) + 1j * rng.normal(0, 0.8, 8) + 1.3
    post = TablePostprocessor(3, tbl)
    assert post.is_complex
    res = estimate_energy(c, (), post, h, mode="infinite_shot")
    assert abs(res.value - exact_energy(c, (), post, h)) <= 1e-10
    real_only = TablePostprocessor(3, tbl.real)
    res2 = estimate_energy(c, (), real_only, h, mode="infinite_shot")
    assert abs(res2.value - exact_energy(c, (), real_only, h)) <= 1e-10


def test_mlp_and_rbm_families_infinite_shot(rng):
    c = random_circuit(rng, 4, depth=2, parameterized=False)
    h = random_hamiltonian(rng, 4, 5)
    for post in (GatedMlp(4, hidden=(6,), seed=2, sigma=0.4),
                 Rbm(4, n_hidden=8, seed=2, sigma=0.2),
                 Rbm(4, n_hidden=8, complex_weights=True, seed=2, sigma=0.2)):
        res = estimate_energy(c, (), post, h, mode="infinite_shot")
        assert abs(res.value - exact_energy(c, (), post, h)) <= 1e-10


def test_sampled_determinism(rng):
    c = random_circuit(rng, 3, depth=1, parameterized=False)
    h = build_tfim(3, "periodic")
    post = identity_post(3)
    a = estimate_energy(c, (), post, h, shot_plan=2000, seed=9, mode="sampled")
    b = estimate_energy(c, (), post, h, shot_plan=2000, seed=9, mode="sampled")
    assert a.value == b.value and a.stderr == b.stderr


def test_per_term_breakdown(rng):
    c = random_circuit(rng, 3, depth=1, parameterized=False)
    h = build_tfim(3, "periodic")
    res = estimate_energy(c, (), identity_post(3), h, mode="exact")
    assert len(res.per_term) == len(h.terms)
    assert abs(sum(t["value"] for t in res.per_term) - res.value) <= 1e-10


def test_mode_and_dimension_errors(rng):
    c = Circuit(2)
    h = build_tfim(3, "periodic")
    with pytest.raises(EstimationError):
        estimate_energy(c, (), identity_post(2), h)
    with pytest.raises(EstimationError):
        estimate_energy(Circuit(3), (), identity_post(3), h, mode="bogus")
    with pytest.raises(EstimationError):
        estimate_energy(Circuit(3), (), identity_post(3), h, mode="sampled")
