"""Numba-compiled gate application kernels.

Hot inner loops of the statevector simulator.  Index math follows the
standard bit-insertion trick: iterate over the 2**(n-k) amplitude groups
and rebuild the full index by inserting the target bits.
"""

import numba
import numpy as np
from numba import njit


@njit(cache=True)
def apply_1q(state, mat, pos):
    tk = 1 << pos
    m00, m01 = mat[0, 0], mat[0, 1]
    m10, m11 = mat[1, 0], mat[1, 1]
    for g in range(state.size >> 1):
        i0 = ((g >> pos) << (pos + 1)) | (g & (tk - 1))
        i1 = i0 | tk
        a = state[i0]
        b = state[i1]
        state[i0] = m00 * a + m01 * b
        state[i1] = m10 * a + m11 * b


@njit(cache=True)
def apply_2q(state, mat, pos_a, pos_b):
    # Row order of ``mat`` is |q_a q_b> = |00>, |01>, |10>, |11>.
    bit_a = 1 << pos_a
    bit_b = 1 << pos_b
    p_lo = min(pos_a, pos_b)
    p_hi = max(pos_a, pos_b)
    for g in range(state.size >> 2):
        i = ((g >> p_lo) << (p_lo + 1)) | (g & ((1 << p_lo) - 1))
        i = ((i >> p_hi) << (p_hi + 1)) | (i & ((1 << p_hi) - 1))
        i00 = i
        i01 = i | bit_b
        i10 = i | bit_a
        i11 = i | bit_a | bit_b
        v0, v1, v2, v3 = state[i00], state[i01], state[i10], state[i11]
        state[i00] = mat[0, 0] * v0 + mat[0, 1] * v1 + mat[0, 2] * v2 + mat[0, 3] * v3
        state[i01] = mat[1, 0] * v0 + mat[1, 1] * v1 + mat[1, 2] * v2 + mat[1, 3] * v3
        state[i10] = mat[2, 0] * v0 + mat[2, 1] * v1 + mat[2, 2] * v2 + mat[2, 3] * v3
        state[i11] = mat[3, 0] * v0 + mat[3, 1] * v1 + mat[3, 2] * v2 + mat[3, 3] * v3


@njit(cache=True)
def apply_diag_2q(state, diag, pos_a, pos_b):
    for i in range(state.size):
        sel = (((i >> pos_a) & 1) << 1) | ((i >> pos_b) & 1)
        state[i] *= diag[sel]
