"""Joint optimization of circuit parameters and post-processor weights.

Gradients: parameter-shift rule for every circuit angle (all generators
are involutory under the exp(i t P) convention), quotient-rule assembly
for the normalized energy, and reverse-mode weight gradients for the
post-processor.  Optimization is Adam with per-module learning-rate
schedules and multi-restart orchestration.
"""

from dataclasses import dataclass

import numpy as np

from .circuit import resolve_angle
from .estimate import EstimationError, estimate_energy
from .statevector import apply_gate, run_circuit

SHIFT = np.pi / 4
_SHIFTABLE = {"RX", "RZ", "EXP_ZZ", "EXP_SWAP"}


class TrainingError(ValueError):
    pass


def lr_schedule(kind, step):
    """Named learning-rate schedules (constant warm-up, then exponential decay)."""
    if kind == "h6_pqc":
        return 0.01 if step < 200 else 0.002 * 0.5 ** ((step - 200) / 800)
    if kind == "h6_nn":
        return 0.0006 if step < 200 else 0.006 * 0.5 ** ((step - 200) / 20000)
    raise TrainingError(f"unknown schedule kind {kind!r}")


def resolve_lr(spec, step):
    if isinstance(spec, (int, float)):
        return float(spec)
    kind = spec["kind"]
    if kind == "const":
        return float(spec["value"])
    if kind == "warm_exp":
        warm_steps = spec.get("warm_steps", 200)
        if step < warm_steps:
            return float(spec["warm"])
        return float(spec["base"]) * 0.5 ** ((step - warm_steps) / spec["halflife"])
    return lr_schedule(kind, step)


def parameter_shift_grad(circuit, params, expectation):
    """Gradient of an expectation value via evaluations at theta +- pi/4.

    ``expectation(params, overrides)`` must evaluate the objective with
    optional per-gate angle overrides (gate index -> angle).  Slots shared
    by several gates accumulate one shift pair per gate occurrence.
    """
    params = np.asarray(params, dtype=float)
    slot_gates = {}
    for gi, g in enumerate(circuit.gates):
        if g.param is not None:
            if g.kind not in _SHIFTABLE:
                raise TrainingError(f"gate kind {g.kind} has no involutory generator")
            slot_gates.setdefault(g.param, []).append(gi)
    grad = np.zeros(circuit.n_params)
    for slot, gis in slot_gates.items():
        for gi in gis:
            base = params[slot]
            up = expectation(params, {gi: base + SHIFT})
            dn = expectation(params, {gi: base - SHIFT})
            grad[slot] += up - dn
    return grad


@dataclass
class GradientReport:
    energy: float
    dtheta: np.ndarray
    dphi: np.ndarray


def _apply_generator(kind, qubits, n, vec):
    """P @ vec for the involutory generator P of a gate exp(i*theta*P)."""
    idx = np.arange(vec.size)
    if kind == "RX":
        return vec[idx ^ (1 << (n - 1 - qubits[0]))]
    if kind == "RZ":
        bit = (idx >> (n - 1 - qubits[0])) & 1
        return vec * (1 - 2 * bit)
    if kind == "EXP_ZZ":
        b1 = (idx >> (n - 1 - qubits[0])) & 1
        b2 = (idx >> (n - 1 - qubits[1])) & 1
        return vec * (1 - 2 * (b1 ^ b2))
    if kind == "EXP_SWAP":
        p1, p2 = n - 1 - qubits[0], n - 1 - qubits[1]
        b1 = (idx >> p1) & 1
        b2 = (idx >> p2) & 1
        swapped = (idx & ~((1 << p1) | (1 << p2))) | (b2 << p1) | (b1 << p2)
        return vec[swapped]
    raise TrainingError(f"gate kind {kind} has no involutory generator")


def adjoint_theta_gradient(circuit, params, psi, w):
    """grad_k = 2 Re <d_k psi | w> via one reverse pass over the gates.

    Identical values to the parameter-shift route (both are exact), at
    O(#gates) amplitude updates instead of two circuit runs per angle.
    """
    n = circuit.n_qubits
    phi = np.array(psi, dtype=complex)
    lam = np.array(w, dtype=complex)
    grad = np.zeros(circuit.n_params)
    for gi in reversed(range(len(circuit.gates))):
        g = circuit.gates[gi]
        angle = resolve_angle(g, params, None, gi)
        if g.param is not None:
            pphi = _apply_generator(g.kind, g.qubits, n, phi)
            grad[g.param] += 2.0 * np.real(-1j * np.vdot(pphi, lam))
        apply_gate(g, phi, n, angle, adjoint=True)
        apply_gate(g, lam, n, angle, adjoint=True)
    return grad


def _nd(circuit, params, fvals, tables, ham, overrides=None):
    """Unnormalized numerator/denominator (and intermediates) at given angles."""
    psi = run_circuit(circuit, params, overrides).amplitudes
    if fvals is None:
        u = psi
    else:
        u = fvals * psi
    hu = ham.apply(u, tables)
    num = float(np.vdot(u, hu).real)
    den = float(np.vdot(u, u).real)
    return num, den, psi, u, hu


def vqnhe_gradient(circuit, params, post, ham, mode="exact", shots=None, seed=None):
    """Energy and exact gradients of the hybrid Rayleigh quotient.

    ``post=None`` means the identity post-processing (plain VQE objective).
    In sampled mode the circuit gradient uses parameter-shifted sampled
    estimates with fresh sub-seeds; weight gradients keep the exact form.
    """
    params = np.asarray(params, dtype=float)
    n = circuit.n_qubits
    tables = ham.term_tables()
    fvals = None if post is None else np.asarray(post.eval_table(n), dtype=complex)
    num, den, psi, u, hu = _nd(circuit, params, fvals, tables, ham)
    if den <= 1e-12:
        raise EstimationError("degenerate denominator")
    energy = num / den

    if mode == "sampled":
        if shots is None:
            raise TrainingError("sampled gradient mode requires a shot budget")
        seq = np.random.SeedSequence(seed)
        counter = [0]
        def expectation(p, overrides=None):
            counter[0] += 1
            if post is None:
                from .postproc import TablePostprocessor
                ident = TablePostprocessor(n, np.ones(1 << n))
                return estimate_energy(_with_overrides(circuit, p, overrides), p,
                                       ident, ham, shot_plan=shots,
                                       seed=counter[0], mode="sampled").value
            return estimate_energy(_with_overrides(circuit, p, overrides), p, post,
                                   ham, shot_plan=shots, seed=counter[0],
                                   mode="sampled").value
        dtheta = parameter_shift_grad(circuit, params, expectation)
        energy = expectation(params)
    elif mode == "adjoint":
        w = hu - energy * u
        if fvals is not None:
            w = np.conj(fvals) * w
        dtheta = adjoint_theta_gradient(circuit, params, psi, w / den)
    else:
        def nd_pair(p, overrides=None):
            nu, de, *_ = _nd(circuit, p, fvals, tables, ham, overrides)
            return nu, de
        dnum = np.zeros(circuit.n_params)
        dden = np.zeros(circuit.n_params)
        slot_gates = {}
        for gi, g in enumerate(circuit.gates):
            if g.param is not None:
                if g.kind not in _SHIFTABLE:
                    raise TrainingError(f"gate kind {g.kind} has no involutory generator")
                slot_gates.setdefault(g.param, []).append(gi)
        for slot, gis in slot_gates.items():
            for gi in gis:
                base = params[slot]
                nu_p, de_p = nd_pair(params, {gi: base + SHIFT})
                nu_m, de_m = nd_pair(params, {gi: base - SHIFT})
                dnum[slot] += nu_p - nu_m
                dden[slot] += de_p - de_m
        dtheta = (dnum * den - num * dden) / den ** 2

    if post is None:
        dphi = np.zeros(0)
    else:
        r = np.conj(psi) * (hu - energy * u) / den
        dphi = 2.0 * post.grad_vjp(_bits_cache(n), r)
    return GradientReport(float(energy), dtheta, dphi)


_BITS_CACHE = {}


def _bits_cache(n):
    if n not in _BITS_CACHE:
        from .postproc import bits_table
        _BITS_CACHE[n] = bits_table(n)
    return _BITS_CACHE[n]


def _with_overrides(circuit, params, overrides):
    if not overrides:
        return circuit
    from .circuit import Circuit, Gate
    gates = list(circuit.gates)
    for gi, angle in overrides.items():
        g = gates[gi]
        gates[gi] = Gate(g.kind, g.qubits, None, float(angle), g.matrix)
    return Circuit(circuit.n_qubits, tuple(gates), circuit.n_params, circuit.initial)


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, size):
        return cls(np.zeros(size), np.zeros(size))


def adam_step(state, params, grads, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected Adam update; returns (new_state, new_params)."""
    grads = np.asarray(grads, dtype=float)
    if not np.all(np.isfinite(grads)):
        raise TrainingError("non-finite gradient")
    t = state.t + 1
    m = beta1 * state.m + (1 - beta1) * grads
    v = beta2 * state.v + (1 - beta2) * grads ** 2
    mhat = m / (1 - beta1 ** t)
    vhat = v / (1 - beta2 ** t)
    new_params = params - lr * mhat / (np.sqrt(vhat) + eps)
    return AdamState(m, v, t), new_params


@dataclass
class StageConfig:
    steps: int
    train_pqc: bool = True
    train_nn: bool = True
    use_post: bool = True          # False: plain-VQE objective (f == 1)
    pqc_lr: object = 0.01
    nn_lr: object = 0.01
    early_stop: bool = True


@dataclass
class TrainingConfig:
    stages: tuple
    restarts: int = 1
    seed: int = 0
    convergence_threshold: float = 1e-9
    patience: int = 50
    gradient_mode: str = "exact"
    grad_shots: int = 4096
    pqc_init_sigma: float = 0.2
    warm_start_theta: np.ndarray | None = None
    warm_start_noise: float = 0.1


@dataclass
class TrainState:
    theta: np.ndarray
    phi: np.ndarray
    step: int
    best_energy: float
    best_theta: np.ndarray
    best_phi: np.ndarray
    history: list
    vqe_energy: float | None
    seed: int


@dataclass
class FitProblem:
    hamiltonian: object
    circuit: object
    post_factory: object       # callable(seed) -> Postprocessor, or None


def fit(problem, config):
    """Run all restarts and return the best TrainState.

    ``vqe_energy`` on the returned state is the best plain-VQE energy
    observed across restarts (stages with use_post=False).
    """
    seq = np.random.SeedSequence(config.seed)
    seeds = seq.spawn(max(config.restarts, 1))
    best = None
    best_vqe = None
    for r, child in enumerate(seeds):
        state = _fit_single(problem, config, child, r)
        if best is None or state.best_energy < best.best_energy:
            best = state
        if state.vqe_energy is not None:
            if best_vqe is None or state.vqe_energy < best_vqe:
                best_vqe = state.vqe_energy
    best.vqe_energy = best_vqe
    return best


def _fit_single(problem, config, seed_seq, restart_index):
    rng = np.random.default_rng(seed_seq)
    circuit = problem.circuit
    theta = rng.normal(0.0, config.pqc_init_sigma, circuit.n_params)
    if config.warm_start_theta is not None:
        noise = rng.uniform(-config.warm_start_noise / 2,
                            config.warm_start_noise / 2, circuit.n_params)
        theta = np.asarray(config.warm_start_theta, dtype=float) + noise
    post_seed = int(rng.integers(0, 2 ** 31 - 1))
    post = problem.post_factory(post_seed) if problem.post_factory else None
    mode = config.gradient_mode
    if mode in ("exact", "infinite_shot"):
        mode = "adjoint"   # same exact gradient, one reverse pass instead of shift pairs

    history = []
    best_energy = np.inf
    best_theta = theta.copy()
    best_phi = post.get_weights().copy() if post else np.zeros(0)
    vqe_energy = None
    global_step = 0

    for stage_idx, stage in enumerate(config.stages):
        adam_pqc = AdamState.zeros(circuit.n_params)
        adam_nn = AdamState.zeros(post.n_weights if post else 0)
        stage_post = post if stage.use_post else None
        flat = 0
        prev_e = None
        for step in range(stage.steps):
            report = vqnhe_gradient(
                circuit, theta, stage_post, problem.hamiltonian,
                mode=mode,
                shots=config.grad_shots,
                seed=int(rng.integers(0, 2 ** 31 - 1)) if mode == "sampled" else None,
            )
            e = report.energy
            lr_p = resolve_lr(stage.pqc_lr, step)
            lr_n = resolve_lr(stage.nn_lr, step)
            history.append({"step": global_step, "stage": stage_idx, "energy": e,
                            "lr_pqc": lr_p if stage.train_pqc else 0.0,
                            "lr_nn": lr_n if stage.train_nn and stage_post else 0.0})
            if e < best_energy:
                best_energy = e
                best_theta = theta.copy()
                best_phi = post.get_weights().copy() if post else np.zeros(0)
            if not stage.use_post and (vqe_energy is None or e < vqe_energy):
                vqe_energy = e
            if stage.train_pqc:
                adam_pqc, theta = adam_step(adam_pqc, theta, report.dtheta, lr_p)
            if stage.train_nn and stage_post is not None:
                adam_nn, w = adam_step(adam_nn, stage_post.get_weights(),
                                       report.dphi, lr_n)
                stage_post.set_weights(w)
            global_step += 1
            if stage.early_stop and prev_e is not None:
                flat = flat + 1 if abs(e - prev_e) < config.convergence_threshold else 0
                if flat >= config.patience:
                    break
            prev_e = e

    return TrainState(theta, post.get_weights() if post else np.zeros(0),
                      global_step, float(best_energy), best_theta, best_phi,
                      history, vqe_energy, restart_index)
