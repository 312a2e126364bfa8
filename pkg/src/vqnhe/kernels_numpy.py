"""Pure-numpy gate application kernels.

Fallback path used when numba is unavailable or when VQNHE_BACKEND=numpy.
All kernels mutate ``state`` (a flat complex128 array of length 2**n) in
place.  ``pos`` arguments are bit positions counted from the least
significant bit of the basis index.
"""

import numpy as np


def apply_1q(state, mat, pos):
    view = state.reshape(-1, 2, 1 << pos)
    a = view[:, 0, :].copy()
    b = view[:, 1, :].copy()
    view[:, 0, :] = mat[0, 0] * a + mat[0, 1] * b
    view[:, 1, :] = mat[1, 0] * a + mat[1, 1] * b


def apply_2q(state, mat, pos_a, pos_b):
    # Row order of ``mat`` is |q_a q_b> = |00>, |01>, |10>, |11>.
    bit_a = 1 << pos_a
    bit_b = 1 << pos_b
    idx = np.arange(state.size)
    base = idx[(idx & (bit_a | bit_b)) == 0]
    i = (base, base | bit_b, base | bit_a, base | bit_a | bit_b)
    v = np.stack([state[j] for j in i])
    out = mat @ v
    for k in range(4):
        state[i[k]] = out[k]


def apply_diag_2q(state, diag, pos_a, pos_b):
    bit_a = 1 << pos_a
    bit_b = 1 << pos_b
    idx = np.arange(state.size)
    sel = ((idx >> pos_a) & 1) * 2 + ((idx >> pos_b) & 1)
    state *= diag[sel]
