"""Gate definitions and matrix realizations.

Rotation convention: RX(t) = exp(i t X), RZ(t) = exp(i t Z),
EXP_ZZ(t) = exp(i t Z@Z), EXP_SWAP(t) = exp(i t SWAP).
"""

import numpy as np

SQ2 = 1.0 / np.sqrt(2.0)

H_MAT = np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=complex)
X_MAT = np.array([[0, 1], [1, 0]], dtype=complex)
Y_MAT = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z_MAT = np.array([[1, 0], [0, -1]], dtype=complex)
SWAP_MAT = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# kind -> (n_qubits, parameterized)
GATE_KINDS = {
    "H": (1, False),
    "X": (1, False),
    "RX": (1, True),
    "RZ": (1, True),
    "CX": (2, False),
    "CY": (2, False),
    "CZ": (2, False),
    "EXP_ZZ": (2, True),
    "EXP_SWAP": (2, True),
    "U2": (1, False),
}


def _controlled(mat2):
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = mat2
    return out


CX_MAT = _controlled(X_MAT)
CY_MAT = _controlled(Y_MAT)
CZ_MAT = _controlled(Z_MAT)


def rx(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 1j * s], [1j * s, c]])


def rz(theta):
    return np.array([[np.exp(1j * theta), 0], [0, np.exp(-1j * theta)]])


def exp_zz_diag(theta):
    """Diagonal of exp(i t Z@Z) in the |00>,|01>,|10>,|11> basis."""
    p, m = np.exp(1j * theta), np.exp(-1j * theta)
    return np.array([p, m, m, p])


def exp_swap(theta):
    return np.cos(theta) * np.eye(4, dtype=complex) + 1j * np.sin(theta) * SWAP_MAT


def gate_matrix(kind, angle=None, matrix=None):
    """Dense unitary for one gate, 2x2 or 4x4."""
    if kind == "H":
        return H_MAT
    if kind == "X":
        return X_MAT
    if kind == "RX":
        return rx(angle)
    if kind == "RZ":
        return rz(angle)
    if kind == "CX":
        return CX_MAT
    if kind == "CY":
        return CY_MAT
    if kind == "CZ":
        return CZ_MAT
    if kind == "EXP_ZZ":
        return np.diag(exp_zz_diag(angle))
    if kind == "EXP_SWAP":
        return exp_swap(angle)
    if kind == "U2":
        return matrix
    raise ValueError(f"unknown gate kind {kind!r}")
