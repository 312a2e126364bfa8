"""Variational quantum-neural hybrid eigensolver toolkit."""

from .backend import BACKEND
from .circuit import Circuit, Gate
from .estimate import (
    EstimationResult, ShotPlan, estimate_energy, exact_energy, shot_bound,
    stderr_bound,
)
from .measure import MeasurementPlan, build_v, build_v_prime, verify_eigenbasis
from .pauli import (
    Hamiltonian, PauliString, PauliTerm, build_heisenberg, build_tfim,
    exact_ground, parse_hamiltonian, pauli_from_label,
)
from .postproc import GatedMlp, Jastrow, Rbm, make_postprocessor
from .statevector import Statevector, run_circuit
from .train import FitProblem, StageConfig, TrainingConfig, fit, vqnhe_gradient

__all__ = [
    "BACKEND", "Circuit", "Gate", "EstimationResult", "ShotPlan",
    "estimate_energy", "exact_energy", "shot_bound", "stderr_bound",
    "MeasurementPlan", "build_v", "build_v_prime", "verify_eigenbasis",
    "Hamiltonian", "PauliString", "PauliTerm", "build_heisenberg",
    "build_tfim", "exact_ground", "parse_hamiltonian", "pauli_from_label",
    "GatedMlp", "Jastrow", "Rbm", "make_postprocessor",
    "Statevector", "run_circuit",
    "FitProblem", "StageConfig", "TrainingConfig", "fit", "vqnhe_gradient",
]

__version__ = "0.1.0"
