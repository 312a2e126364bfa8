"""Kernel backend selection.

The environment variable VQNHE_BACKEND chooses the gate-application
kernels: "numba" (default when importable) or "numpy".
"""

import os


def _select():
    choice = os.environ.get("VQNHE_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(f"unknown VQNHE_BACKEND {choice!r}; use 'numba' or 'numpy'")
    if choice in ("", "numba"):
        try:
            from . import kernels_numba
            return kernels_numba, "numba"
        except ImportError:
            if choice == "numba":
                raise
    from . import kernels_numpy
    return kernels_numpy, "numpy"


kernels, BACKEND = _select()
