"""Hybrid-state energy estimation.

Three routes: exact dense Rayleigh quotient, infinite-shot analytic
expectations (sample means replaced by exact distribution averages), and
finite-shot sampled estimation with first-order error propagation of the
numerator/denominator ratio.
"""

from dataclasses import dataclass

import numpy as np

from .measure import (
    DIAGONAL, IMAG_PART, REAL_PART, build_v, build_v_prime, diagonal_plan,
    z_sign_table,
)
from .postproc import bits_table
from .statevector import apply_gates, run_circuit

DENOM_EPS = 1e-12


class EstimationError(ValueError):
    pass


@dataclass(frozen=True)
class ShotPlan:
    per_term: tuple
    denominator: int

    def __post_init__(self):
        if self.denominator < 1 or any(s < 1 for s in self.per_term):
            raise EstimationError("all shot counts must be >= 1")

    @property
    def total(self):
        return self.denominator + sum(self.per_term)

    @classmethod
    def uniform(cls, n_terms, shots):
        return cls((shots,) * n_terms, shots)


@dataclass(frozen=True)
class EstimationResult:
    value: float
    stderr: float
    shots_used: int
    per_term: tuple
    denominator: float


def shot_bound(r, eps):
    """Shots sufficient for accuracy eps with |f| in [1/r, r]: ceil(9r^4/(4 eps^2))."""
    if r < 1 or eps <= 0:
        raise EstimationError("need r >= 1 and eps > 0")
    return int(np.ceil(9.0 * r ** 4 / (4.0 * eps ** 2)))


def stderr_bound(r, n_shots):
    """Deviation ceiling 3 r^2 / (2 sqrt(N)) for a single Pauli-string estimate."""
    if n_shots < 1:
        raise EstimationError("n_shots must be >= 1")
    return 3.0 * r ** 2 / (2.0 * np.sqrt(n_shots))


def exact_energy(circuit, params, post, ham):
    """Rayleigh quotient of the post-processed state against the Hamiltonian."""
    psi = run_circuit(circuit, params).amplitudes
    fvals = np.asarray(post.eval_table(circuit.n_qubits), dtype=complex)
    u = fvals * psi
    d = float(np.vdot(u, u).real)
    if d <= DENOM_EPS:
        raise EstimationError("post-processed state has (near-)zero norm")
    hu = ham.apply(u)
    return float(np.vdot(u, hu).real / d)


def _offdiag_weights(plan, fvals):
    """Per-outcome estimator weights for one measurement plan."""
    dim = 1 << plan.n_qubits
    idx = np.arange(dim)
    star = plan.star_mask()
    pair = star | plan.flip_mask()
    a = idx & ~star
    b = a ^ pair
    sign = np.where(idx & star, -1.0, 1.0)
    g = np.conj(fvals[a]) * fvals[b]
    part = g.real if plan.mode == REAL_PART else g.imag
    return sign * z_sign_table(plan) * part


def _diag_weights(term, fvals):
    p = diagonal_plan(term.string)
    return z_sign_table(p) * np.abs(fvals) ** 2


def _plans_for_term(term, post, include_cz):
    if term.string.is_diagonal:
        return [diagonal_plan(term.string)]
    plans = [build_v(term.string, include_cz)]
    if post.is_complex:
        plans.append(build_v_prime(term.string, include_cz))
    return plans


def _measured_probs(circuit, params, plan):
    amp = run_circuit(circuit, params).amplitudes.copy()
    if plan.appended.gates:
        apply_gates(plan.appended, amp)
    return np.abs(amp) ** 2


def _batch_mean(probs, weights, shots, rng):
    counts = rng.multinomial(shots, probs / probs.sum())
    nz = counts > 0
    c = counts[nz].astype(float)
    w = weights[nz]
    mean = float(np.dot(c, w) / shots)
    if shots > 1:
        var = float(np.dot(c, (w - mean) ** 2) / (shots - 1))
        sem = np.sqrt(var / shots)
    else:
        sem = 0.0
    return mean, sem


def denominator_estimate(batch, post):
    """Sample mean and standard error of |f(s)|^2 over a U-basis batch."""
    if batch.total_shots < 1:
        raise EstimationError("empty batch")
    idx, cnt = batch.index_counts()
    tbl = bits_table(batch.n_qubits)[idx]
    vals = np.abs(np.asarray(post.eval_batch(tbl), dtype=complex)) ** 2
    shots = batch.total_shots
    mean = float(np.dot(cnt, vals) / shots)
    sem = 0.0
    if shots > 1:
        var = float(np.dot(cnt, (vals - mean) ** 2) / (shots - 1))
        sem = np.sqrt(var / shots)
    return mean, sem


def diagonal_term_estimate(batch, post, term):
    """Eq.-style diagonal numerator: coeff * mean(|f|^2 * prod (1-2 s_j))."""
    if not term.string.is_diagonal:
        raise EstimationError(f"term {term.string.ops!r} is not diagonal")
    idx, cnt = batch.index_counts()
    fvals = np.zeros(1 << batch.n_qubits, dtype=complex)
    tbl = bits_table(batch.n_qubits)[idx]
    fvals[idx] = np.asarray(post.eval_batch(tbl), dtype=complex)
    w = _diag_weights(term, fvals)
    return float(term.coeff * np.dot(cnt, w[idx]) / batch.total_shots)


def offdiagonal_term_estimate(batch, post, plan, term):
    """Off-diagonal numerator contribution from a V (or V') basis batch."""
    if batch.total_shots < 1:
        raise EstimationError("empty batch")
    if plan.pauli != term.string:
        raise EstimationError("plan does not match term")
    idx, cnt = batch.index_counts()
    fvals = np.asarray(post.eval_table(batch.n_qubits), dtype=complex)
    w = _offdiag_weights(plan, fvals)
    return float(term.coeff * np.dot(cnt, w[idx]) / batch.total_shots)


def estimate_energy(circuit, params, post, ham, shot_plan=None, seed=None,
                    mode="exact", include_cz=False):
    """Estimate the hybrid energy; mode in {exact, infinite_shot, sampled}."""
    if mode not in ("exact", "infinite_shot", "sampled"):
        raise EstimationError(f"unknown mode {mode!r}")
    n = circuit.n_qubits
    if ham.n_qubits != n:
        raise EstimationError("Hamiltonian/circuit qubit count mismatch")
    if post.n_bits != n:
        raise EstimationError("post-processor bit count mismatch")

    if mode == "exact":
        psi = run_circuit(circuit, params).amplitudes
        fvals = np.asarray(post.eval_table(n), dtype=complex)
        u = fvals * psi
        d = float(np.vdot(u, u).real)
        if d <= DENOM_EPS:
            raise EstimationError("degenerate denominator")
        per_term = []
        total = 0.0
        for coeff, mask, phase in ham.term_tables():
            pu = phase * u
            val = coeff * float(np.vdot(u, pu[np.arange(u.size) ^ mask] if mask else pu).real)
            per_term.append(val / d)
            total += val
        labels = [t.string.label() for t in ham.terms]
        terms = tuple(
            {"term": lbl, "value": v, "stderr": 0.0} for lbl, v in zip(labels, per_term)
        )
        return EstimationResult(total / d, 0.0, 0, terms, d)

    psi = run_circuit(circuit, params).amplitudes
    fvals = np.asarray(post.eval_table(n), dtype=complex)
    probs_u = np.abs(psi) ** 2
    denom_w = np.abs(fvals) ** 2

    if mode == "sampled":
        if shot_plan is None:
            raise EstimationError("sampled mode requires a shot plan")
        if isinstance(shot_plan, int):
            shot_plan = ShotPlan.uniform(len(ham.terms), shot_plan)
        if len(shot_plan.per_term) != len(ham.terms):
            raise EstimationError("shot plan length does not match term count")
        seq = np.random.SeedSequence(seed)
        rngs = [np.random.default_rng(s) for s in seq.spawn(len(ham.terms) + 1)]
        d, d_sem = _batch_mean(probs_u, denom_w, shot_plan.denominator, rngs[0])
        if d <= DENOM_EPS:
            raise EstimationError("degenerate sampled denominator")
        shots_used = shot_plan.denominator
        num = 0.0
        num_var = 0.0
        terms = []
        for ti, term in enumerate(ham.terms):
            rng = rngs[ti + 1]
            val = 0.0
            sem2 = 0.0
            for plan in _plans_for_term(term, post, include_cz):
                shots = shot_plan.per_term[ti]
                if plan.mode == DIAGONAL:
                    w = _diag_weights(term, fvals)
                    m, s = _batch_mean(probs_u, w, shots, rng)
                else:
                    probs = _measured_probs(circuit, params, plan)
                    w = _offdiag_weights(plan, fvals)
                    m, s = _batch_mean(probs, w, shots, rng)
                shots_used += shots
                val += term.coeff * m
                sem2 += (term.coeff * s) ** 2
            num += val
            num_var += sem2
            terms.append({"term": term.string.label(), "value": val / d,
                          "stderr": np.sqrt(sem2) / d})
        num_sem = np.sqrt(num_var)
        value = num / d
        stderr = num_sem / abs(d) + abs(num) * d_sem / d ** 2
        return EstimationResult(float(value), float(stderr), shots_used,
                                tuple(terms), float(d))

    # infinite-shot mode: exact expectations over the simulated distributions
    d = float(np.dot(probs_u, denom_w))
    if d <= DENOM_EPS:
        raise EstimationError("degenerate denominator")
    num = 0.0
    terms = []
    for term in ham.terms:
        val = 0.0
        for plan in _plans_for_term(term, post, include_cz):
            if plan.mode == DIAGONAL:
                w = _diag_weights(term, fvals)
                val += term.coeff * float(np.dot(probs_u, w))
            else:
                probs = _measured_probs(circuit, params, plan)
                w = _offdiag_weights(plan, fvals)
                val += term.coeff * float(np.dot(probs, w))
        num += val
        terms.append({"term": term.string.label(), "value": val / d, "stderr": 0.0})
    return EstimationResult(num / d, 0.0, 0, tuple(terms), d)
