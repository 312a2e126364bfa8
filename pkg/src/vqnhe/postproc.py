"""Diagonal neural post-processors f(s): Jastrow, gated MLP, real/complex RBM.

Each family exposes batched evaluation over 0/1 bit arrays, exact
reverse-mode gradients with respect to a flat real weight vector, and an
output-range bound r with |f| in [1/r, r] (exact for the gated MLP,
conservative otherwise).  Complex weights occupy two real slots each
(all real parts first, then all imaginary parts).
"""

import numpy as np


class PostprocError(ValueError):
    pass


def bits_table(n):
    """(2**n, n) array of bits, row index = basis index, qubit 0 leftmost."""
    idx = np.arange(1 << n)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)[None, :]) & 1).astype(float)


def bits_from_strings(strings):
    return np.array([[int(c) for c in s] for s in strings], dtype=float)


class Postprocessor:
    """Interface: eval/grad over bitstrings, flat real weights, range bound."""

    n_bits: int
    is_complex = False
    range_guarded = False

    def get_weights(self):
        raise NotImplementedError

    def set_weights(self, w):
        raise NotImplementedError

    @property
    def n_weights(self):
        return self.get_weights().size

    def eval_batch(self, bits):
        raise NotImplementedError

    def grad_batch(self, bits):
        raise NotImplementedError

    def grad_vjp(self, bits, v):
        """Re(G^dagger v) for Jacobian G = grad_batch(bits), without
        materializing G; families override with a direct backward pass."""
        return np.real(self.grad_batch(bits).conj().T @ v)

    def output_range(self):
        raise NotImplementedError

    def eval(self, s):
        return complex(self.eval_batch(bits_from_strings([s]))[0])

    def grad(self, s):
        return self.grad_batch(bits_from_strings([s]))[0]

    def eval_table(self, n=None):
        """f over every basis index."""
        return self.eval_batch(bits_table(self.n_bits if n is None else n))


def grad(post, s):
    """Per-weight partial derivatives of post.eval(s)."""
    return post.grad(s)


def finite_difference_grad(post, s, step=1e-5):
    """Central-difference audit of grad(); independent of the backprop path."""
    w0 = post.get_weights().copy()
    out = np.zeros(w0.size, dtype=complex)
    for k in range(w0.size):
        w = w0.copy()
        w[k] = w0[k] + step
        post.set_weights(w)
        fp = post.eval(s)
        w[k] = w0[k] - step
        post.set_weights(w)
        fm = post.eval(s)
        out[k] = (fp - fm) / (2 * step)
    post.set_weights(w0)
    return out


class TablePostprocessor(Postprocessor):
    """f given by an explicit table over all 2**n bitstrings (test oracle)."""

    def __init__(self, n_bits, table):
        table = np.asarray(table)
        if table.size != 1 << n_bits:
            raise PostprocError("table length must be 2**n_bits")
        self.n_bits = n_bits
        self.table = table.astype(complex)
        self.is_complex = bool(np.iscomplexobj(table)) and bool(np.any(table.imag != 0))

    def get_weights(self):
        return np.concatenate([self.table.real, self.table.imag])

    def set_weights(self, w):
        half = w.size // 2
        self.table = w[:half] + 1j * w[half:]

    def eval_batch(self, bits):
        n = bits.shape[1]
        idx = (bits.astype(np.int64) << np.arange(n - 1, -1, -1)).sum(axis=1)
        vals = self.table[idx]
        return vals if self.is_complex else vals.real

    def grad_batch(self, bits):
        n = bits.shape[1]
        idx = (bits.astype(np.int64) << np.arange(n - 1, -1, -1)).sum(axis=1)
        g = np.zeros((bits.shape[0], 2 * self.table.size), dtype=complex)
        g[np.arange(bits.shape[0]), idx] = 1.0
        g[np.arange(bits.shape[0]), self.table.size + idx] = 1j
        return g

    def grad_vjp(self, bits, v):
        n = bits.shape[1]
        idx = (bits.astype(np.int64) << np.arange(n - 1, -1, -1)).sum(axis=1)
        out = np.zeros(2 * self.table.size)
        np.add.at(out[:self.table.size], idx, np.real(v))
        np.add.at(out[self.table.size:], idx, np.imag(v))
        return out

    def output_range(self):
        mags = np.abs(self.table)
        return float(max(mags.max(), 1.0 / mags[mags > 0].min()))


class Jastrow(Postprocessor):
    """f(s) = exp(-sum_{i<j} phi_ij x_i x_j) with x = 1 - 2s."""

    range_guarded = True

    def __init__(self, n_bits, weights=None, seed=None, sigma=0.0):
        self.n_bits = n_bits
        self.pairs = [(i, j) for i in range(n_bits) for j in range(i + 1, n_bits)]
        if weights is None:
            if seed is not None and sigma > 0:
                weights = np.random.default_rng(seed).normal(0, sigma, len(self.pairs))
            else:
                weights = np.zeros(len(self.pairs))
        self.phi = np.asarray(weights, dtype=float).copy()
        if self.phi.size != len(self.pairs):
            raise PostprocError(f"expected {len(self.pairs)} weights")

    def get_weights(self):
        return self.phi.copy()

    def set_weights(self, w):
        self.phi = np.asarray(w, dtype=float).copy()

    def _pair_products(self, bits):
        x = 1.0 - 2.0 * bits
        return np.stack([x[:, i] * x[:, j] for i, j in self.pairs], axis=1)

    def eval_batch(self, bits):
        return np.exp(-self._pair_products(bits) @ self.phi)

    def grad_batch(self, bits):
        q = self._pair_products(bits)
        f = np.exp(-q @ self.phi)
        return (-q * f[:, None]).astype(complex)

    def grad_vjp(self, bits, v):
        q = self._pair_products(bits)
        f = np.exp(-q @ self.phi)
        return -q.T @ (f * np.real(v))

    def output_range(self):
        return float(np.exp(np.abs(self.phi).sum()))


_ACTIVATIONS = {
    "relu": (lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(float)),
    "sigmoid": (lambda z: 1.0 / (1.0 + np.exp(-z)), lambda z, a: a * (1.0 - a)),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
}


class GatedMlp(Postprocessor):
    """Fully connected network on +-1 inputs, output gate exp(phi0 * tanh(z)).

    The output range [exp(-|phi0|), exp(|phi0|)] is exact; phi0 is clipped
    to +-phi0_cutoff on every weight update when a cutoff is set.
    """

    range_guarded = True

    def __init__(self, n_bits, hidden=(24, 12), activations=None, phi0_init=1.0,
                 phi0_cutoff=None, seed=0, sigma=0.1):
        self.n_bits = n_bits
        self.hidden = tuple(hidden)
        if activations is None:
            activations = ("relu",) * len(self.hidden)
        self.activations = tuple(activations)
        if len(self.activations) != len(self.hidden):
            raise PostprocError("one activation per hidden layer required")
        for a in self.activations:
            if a not in _ACTIVATIONS:
                raise PostprocError(f"unknown activation {a!r}")
        self.phi0_cutoff = phi0_cutoff
        rng = np.random.default_rng(seed)
        self.layers = []
        widths = (n_bits,) + self.hidden + (1,)
        for w_in, w_out in zip(widths[:-1], widths[1:]):
            self.layers.append([rng.normal(0, sigma, (w_in, w_out)), np.zeros(w_out)])
        self.phi0 = float(phi0_init)
        self._clip_phi0()

    def _clip_phi0(self):
        if self.phi0_cutoff is not None:
            self.phi0 = float(np.clip(self.phi0, -self.phi0_cutoff, self.phi0_cutoff))

    def get_weights(self):
        parts = [w.ravel() for w, b in self.layers] + [b for w, b in self.layers]
        return np.concatenate([np.concatenate(parts), [self.phi0]])

    def set_weights(self, w):
        w = np.asarray(w, dtype=float)
        if not np.all(np.isfinite(w)):
            raise PostprocError("non-finite weights")
        pos = 0
        for layer in self.layers:
            size = layer[0].size
            layer[0] = w[pos:pos + size].reshape(layer[0].shape).copy()
            pos += size
        for layer in self.layers:
            size = layer[1].size
            layer[1] = w[pos:pos + size].copy()
            pos += size
        self.phi0 = float(w[pos])
        self._clip_phi0()

    def _forward(self, bits):
        h = 1.0 - 2.0 * bits
        cache = []
        for li, (w, b) in enumerate(self.layers):
            z = h @ w + b
            if li < len(self.layers) - 1:
                act, _ = _ACTIVATIONS[self.activations[li]]
                a = act(z)
            else:
                a = z
            cache.append((h, z, a))
            h = a
        return h[:, 0], cache

    def eval_batch(self, bits):
        z, _ = self._forward(bits)
        return np.exp(self.phi0 * np.tanh(z))

    def grad_batch(self, bits):
        z, cache = self._forward(bits)
        t = np.tanh(z)
        f = np.exp(self.phi0 * t)
        # d f / d z through the output gate
        dz = f * self.phi0 * (1.0 - t * t)
        batch = bits.shape[0]
        grads_w = []
        grads_b = []
        delta = dz[:, None]
        for li in range(len(self.layers) - 1, -1, -1):
            h_in, zz, a = cache[li]
            if li < len(self.layers) - 1:
                _, dact = _ACTIVATIONS[self.activations[li]]
                delta = delta * dact(zz, a)
            gw = np.einsum("bi,bj->bij", h_in, delta).reshape(batch, -1)
            grads_w.append(gw)
            grads_b.append(delta.copy())
            delta = delta @ self.layers[li][0].T
        grads_w.reverse()
        grads_b.reverse()
        gphi0 = (t * f)[:, None]
        return np.concatenate(grads_w + grads_b + [gphi0], axis=1).astype(complex)

    def grad_vjp(self, bits, v):
        z, cache = self._forward(bits)
        t = np.tanh(z)
        f = np.exp(self.phi0 * t)
        vr = np.real(v)
        dz = f * self.phi0 * (1.0 - t * t) * vr
        grads_w = []
        grads_b = []
        delta = dz[:, None]
        for li in range(len(self.layers) - 1, -1, -1):
            h_in, zz, a = cache[li]
            if li < len(self.layers) - 1:
                _, dact = _ACTIVATIONS[self.activations[li]]
                delta = delta * dact(zz, a)
            grads_w.append((h_in.T @ delta).ravel())
            grads_b.append(delta.sum(axis=0))
            delta = delta @ self.layers[li][0].T
        grads_w.reverse()
        grads_b.reverse()
        gphi0 = np.array([np.dot(t * f, vr)])
        return np.concatenate(grads_w + grads_b + [gphi0])

    def output_range(self):
        return float(np.exp(abs(self.phi0)))


def _log2cosh(z):
    """log(2 cosh z), overflow-safe for real or complex z."""
    z = np.asarray(z)
    re = z.real if np.iscomplexobj(z) else z
    flip = re < 0
    zs = np.where(flip, -z, z)
    return zs + np.log1p(np.exp(-2.0 * zs))


class Rbm(Postprocessor):
    """f(s) = exp(sum_i a_i s_i) * prod_j 2 cosh(b_j + sum_i W_ij s_i).

    Bits enter the formula literally as 0/1.  Evaluation runs in the log
    domain so that M = 40 hidden units cannot overflow.
    """

    def __init__(self, n_bits, n_hidden=None, complex_weights=False, seed=0,
                 sigma=0.005):
        self.n_bits = n_bits
        self.n_hidden = 4 * n_bits if n_hidden is None else n_hidden
        self.is_complex = complex_weights
        rng = np.random.default_rng(seed)
        shape = (self.n_bits + self.n_hidden + self.n_bits * self.n_hidden,)
        theta = rng.normal(0, sigma, shape)
        if complex_weights:
            theta = theta + 1j * rng.normal(0, sigma, shape)
        self.theta = theta.astype(complex if complex_weights else float)

    def _unpack(self):
        n, m = self.n_bits, self.n_hidden
        return self.theta[:n], self.theta[n:n + m], self.theta[n + m:].reshape(n, m)

    def get_weights(self):
        if self.is_complex:
            return np.concatenate([self.theta.real, self.theta.imag])
        return self.theta.copy()

    def set_weights(self, w):
        w = np.asarray(w, dtype=float)
        if self.is_complex:
            half = w.size // 2
            self.theta = w[:half] + 1j * w[half:]
        else:
            self.theta = w.copy()

    def eval_batch(self, bits):
        a, b, w = self._unpack()
        z = bits @ w + b
        logf = bits @ a + _log2cosh(z).sum(axis=1)
        f = np.exp(logf)
        return f if self.is_complex else f.real if np.iscomplexobj(f) else f

    def grad_batch(self, bits):
        a, b, w = self._unpack()
        z = bits @ w + b
        logf = bits @ a + _log2cosh(z).sum(axis=1)
        f = np.exp(logf)
        t = np.tanh(z)
        ga = bits * f[:, None]
        gb = t * f[:, None]
        gw = np.einsum("bi,bj->bij", bits, t).reshape(bits.shape[0], -1) * f[:, None]
        g = np.concatenate([ga, gb, gw], axis=1).astype(complex)
        if self.is_complex:
            g = np.concatenate([g, 1j * g], axis=1)
        return g

    def grad_vjp(self, bits, v):
        a, b, w = self._unpack()
        z = bits @ w + b
        logf = bits @ a + _log2cosh(z).sum(axis=1)
        f = np.exp(logf)
        c = np.conj(f) * v                      # per-sample cotangent
        tc = np.conj(np.tanh(z))
        ga = bits.T @ c
        gb = tc.T @ c
        gw = (bits.T @ (tc * c[:, None])).ravel()
        full = np.concatenate([ga, gb, gw])
        if self.is_complex:
            return np.concatenate([np.real(full), np.imag(full)])
        return np.real(full)

    def output_range(self):
        a, b, w = self._unpack()
        bound = np.abs(a).sum() + (np.log(2.0) + np.abs(b) + np.abs(w).sum(axis=0)).sum()
        return float(np.exp(bound))


def make_postprocessor(spec):
    """Build a post-processor from its JSON spec dict."""
    family = spec["family"]
    n_bits = spec["n_bits"]
    arch = spec.get("arch", {})
    seed = spec.get("seed", 0)
    if family == "jastrow":
        return Jastrow(n_bits, seed=seed, sigma=arch.get("sigma", 0.0))
    if family == "mlp":
        return GatedMlp(
            n_bits,
            hidden=tuple(arch.get("hidden", (24, 12))),
            activations=tuple(arch["activations"]) if "activations" in arch else None,
            phi0_init=arch.get("phi0_init", 1.0),
            phi0_cutoff=spec.get("phi0_cutoff"),
            seed=seed,
            sigma=arch.get("sigma", 0.1),
        )
    if family == "rbm":
        return Rbm(
            n_bits,
            n_hidden=arch.get("n_hidden"),
            complex_weights=spec.get("complex", False),
            seed=seed,
            sigma=arch.get("sigma", 0.005),
        )
    raise PostprocError(f"unknown post-processor family {family!r}")
