"""
Quantum Module

Dense state and operator algebra for spin (x) path (x) energy, and the GHZ
argument built on top of it.
"""

from .core import (
    DIM,
    IDENTITY,
    Axis,
    DensityMatrix,
    DofIndex,
    ObservableSpec,
    OpKind,
    PureState,
    SingleQubitOp,
    TripleOp,
    basis_index,
    commutator,
    densify,
    embed,
    expectation,
    in_plane_observable,
    pauli,
    tensor3,
)
from .ghz import (
    MERMIN_TERMS,
    NCHV_BOUND,
    QUANTUM_BOUND,
    EigenrelationReport,
    GhzSign,
    MerminTerm,
    NchvAssignment,
    NchvReport,
    RelationCheck,
    check_eigenrelations,
    enumerate_nchv,
    ghz_operators,
    ghz_state,
    mermin_operator,
    mermin_value,
    quantum_max,
)

__all__ = [
    "DIM",
    "IDENTITY",
    "MERMIN_TERMS",
    "NCHV_BOUND",
    "QUANTUM_BOUND",
    "Axis",
    "DensityMatrix",
    "DofIndex",
    "EigenrelationReport",
    "GhzSign",
    "MerminTerm",
    "NchvAssignment",
    "NchvReport",
    "ObservableSpec",
    "OpKind",
    "PureState",
    "RelationCheck",
    "SingleQubitOp",
    "TripleOp",
    "basis_index",
    "check_eigenrelations",
    "commutator",
    "densify",
    "embed",
    "enumerate_nchv",
    "expectation",
    "ghz_operators",
    "ghz_state",
    "in_plane_observable",
    "mermin_operator",
    "mermin_value",
    "pauli",
    "quantum_max",
    "tensor3",
]
