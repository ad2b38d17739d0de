"""Mixed-state SPT numerics: Pauli algebra, density matrices, symmetry
classification, lattice models, replica holography, correlators and K-matrix
gapping analysis."""

__version__ = "0.1.0"

from .hilbert import (
    CapacityError,
    DensityMatrix,
    StateVector,
    fidelity,
    partial_trace,
    ppt_negativity,
)
from .holography import TTensor, ReplicaWavefunction, extend, reduce, replica_symmetry_check, trivial_state
from .kernels import BACKEND
from .pauli import JordanWignerMap, MajoranaMonomial, PauliString, jw_encode
from .symmetry import PhaseGate, SymmetryOp, SymmetryVerdict, build_ug, build_uk, classify

__all__ = [
    "BACKEND", "CapacityError", "DensityMatrix", "JordanWignerMap", "MajoranaMonomial", "PauliString",
    "PhaseGate", "ReplicaWavefunction", "StateVector", "SymmetryOp", "SymmetryVerdict", "TTensor",
    "build_ug", "build_uk", "classify", "extend", "fidelity", "jw_encode", "partial_trace",
    "ppt_negativity", "reduce", "replica_symmetry_check", "trivial_state",
]
