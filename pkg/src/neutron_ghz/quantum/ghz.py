"""
GHZ Logic Module

GHZ states of the three neutron degrees of freedom, the Mermin operator and
the two sides of the GHZ argument:

- the quantum side, where the state is a common eigenvector of the product
  observables sigma_x sigma_y sigma_y, sigma_y sigma_x sigma_y,
  sigma_y sigma_y sigma_x and sigma_x sigma_x sigma_x;
- the classical side, where every one of the 64 noncontextual assignments of
  predefined +/-1 outcomes is enumerated and shown to violate at least one of
  the perfect correlations.

Classical and quantum Mermin sums are both evaluated from the single
`MERMIN_TERMS` table.
"""

import itertools
from collections.abc import Iterator
from dataclasses import dataclass, fields
from enum import Enum
from typing import Final

import numpy as np
import structlog

from neutron_ghz.exceptions import InvalidParameterError
from neutron_ghz.quantum.core import (
    DIM,
    Axis,
    DensityMatrix,
    DofIndex,
    OpKind,
    PureState,
    TripleOp,
    expectation,
    pauli,
    tensor3,
)

logger = structlog.get_logger(__name__)

EIGEN_TOL: Final[float] = 1e-12
EIGENVALUE_TOL: Final[float] = 1e-9
NCHV_BOUND: Final[float] = 2.0
QUANTUM_BOUND: Final[float] = 4.0


class GhzSign(str, Enum):
    """
    Relative sign between |000> and |111>.

    PLUS is the neutron state prepared by the interferometer; MINUS is the
    textbook three-particle state of the GHZ argument.
    """

    PLUS = "plus"
    MINUS = "minus"

    @property
    def factor(self) -> int:
        return 1 if self is GhzSign.PLUS else -1


@dataclass(frozen=True)
class MerminTerm:
    """One signed product observable of the Mermin sum."""

    axes: tuple[Axis, Axis, Axis]
    sign: int

    @property
    def label(self) -> str:
        return "".join(axis.value for axis in self.axes)

    def axis(self, dof: DofIndex) -> Axis:
        return self.axes[DofIndex(dof).position]

    def observable(self) -> TripleOp:
        return tensor3(*(pauli(axis) for axis in self.axes))

    @classmethod
    def from_label(cls, label: str) -> "MerminTerm":
        for term in MERMIN_TERMS:
            if term.label == label:
                return term
        msg = f"Unknown Mermin term {label!r}"
        raise KeyError(msg)


MERMIN_TERMS: Final[tuple[MerminTerm, ...]] = (
    MerminTerm((Axis.X, Axis.X, Axis.X), +1),
    MerminTerm((Axis.X, Axis.Y, Axis.Y), -1),
    MerminTerm((Axis.Y, Axis.X, Axis.Y), -1),
    MerminTerm((Axis.Y, Axis.Y, Axis.X), -1),
)


@dataclass(frozen=True)
class NchvAssignment:
    """Predefined +/-1 outcomes for sigma_x and sigma_y of every DOF."""

    m_x_s: int
    m_y_s: int
    m_x_p: int
    m_y_p: int
    m_x_e: int
    m_y_e: int

    def __post_init__(self) -> None:
        for item in fields(self):
            if getattr(self, item.name) not in (1, -1):
                msg = f"{item.name} must be +1 or -1"
                raise InvalidParameterError(msg)

    def value(self, dof: DofIndex, axis: Axis) -> int:
        suffix = {DofIndex.SPIN: "s", DofIndex.PATH: "p", DofIndex.ENERGY: "e"}
        return getattr(self, f"m_{Axis(axis).value}_{suffix[DofIndex(dof)]}")

    def product(self, term: MerminTerm) -> int:
        """Predicted outcome of the product observable of a term."""
        spin, path, energy = term.axes
        return (
            self.value(DofIndex.SPIN, spin)
            * self.value(DofIndex.PATH, path)
            * self.value(DofIndex.ENERGY, energy)
        )

    def mermin_sum(self) -> int:
        return sum(term.sign * self.product(term) for term in MERMIN_TERMS)

    @classmethod
    def all(cls) -> Iterator["NchvAssignment"]:
        """All 64 assignments in lexicographic (+1 first) order."""
        for values in itertools.product((1, -1), repeat=6):
            yield cls(*values)


@dataclass(frozen=True)
class RelationCheck:
    """Result of testing O|psi> = lambda|psi> for one product observable."""

    label: str
    eigenvalue: int
    residual: float
    holds: bool


@dataclass(frozen=True)
class EigenrelationReport:
    sign: GhzSign
    relations: tuple[RelationCheck, ...]

    @property
    def all_hold(self) -> bool:
        return all(relation.holds for relation in self.relations)


@dataclass(frozen=True)
class NchvReport:
    """
    Outcome of the exhaustive noncontextual enumeration.

    Attributes:
        total: Number of assignments enumerated (64)
        satisfying: Assignments obeying all four GHZ relations (must be 0)
        parity_always_positive: Product of the four left-hand sides is +1
            for every assignment
        max_abs_mermin: Largest |M| reached by any assignment (must be 2)
    """

    total: int
    satisfying: int
    parity_always_positive: bool
    max_abs_mermin: int


def ghz_state(sign: GhzSign) -> PureState:
    """(|000> +/- |111>)/sqrt(2); index 7 carries the sign."""
    amplitudes = np.zeros(DIM, dtype=np.complex128)
    amplitudes[0] = 1.0 / np.sqrt(2.0)
    amplitudes[7] = GhzSign(sign).factor / np.sqrt(2.0)
    return PureState(amplitudes)


def ghz_operators() -> tuple[TripleOp, TripleOp, TripleOp]:
    """The three commuting observables xyy, yxy and yyx."""
    _, xyy, yxy, yyx = (term.observable() for term in MERMIN_TERMS)
    return xyy, yxy, yyx


def expected_eigenvalue(term: MerminTerm, sign: GhzSign) -> int:
    """
    Eigenvalue of a Mermin product observable on a GHZ state.

    On the PLUS state the eigenvalue equals the term's sign in M, which is why
    that state saturates the quantum bound; MINUS flips every eigenvalue.
    """
    return term.sign * GhzSign(sign).factor


def check_eigenrelations(
    state: PureState, sign: GhzSign, tol: float = EIGEN_TOL
) -> EigenrelationReport:
    """
    Check the four GHZ eigenrelations on a state.

    For the MINUS sign: xyy, yxy, yyx give +1 and xxx gives -1. For PLUS the
    signs are flipped. The residual is the norm of O|psi> - lambda|psi>.
    """
    relations = []
    for term in (*MERMIN_TERMS[1:], MERMIN_TERMS[0]):
        eigenvalue = expected_eigenvalue(term, sign)
        image = term.observable().apply(state)
        residual = float(np.linalg.norm(image - eigenvalue * state.amplitudes))
        relations.append(
            RelationCheck(
                label=term.label,
                eigenvalue=eigenvalue,
                residual=residual,
                holds=residual < tol,
            )
        )
    report = EigenrelationReport(sign=GhzSign(sign), relations=tuple(relations))
    logger.debug(
        "eigenrelations_checked", sign=report.sign.value, all_hold=report.all_hold
    )
    return report


def enumerate_nchv() -> NchvReport:
    """Enumerate all 64 noncontextual value assignments."""
    satisfying = 0
    parity_always_positive = True
    max_abs_mermin = 0
    for assignment in NchvAssignment.all():
        products = [assignment.product(term) for term in MERMIN_TERMS]
        # xxx must be -1 and the other three +1 for the relations to hold
        required = [-1, 1, 1, 1]
        if products == required:
            satisfying += 1
        if int(np.prod(products)) != 1:
            parity_always_positive = False
        max_abs_mermin = max(max_abs_mermin, abs(assignment.mermin_sum()))

    report = NchvReport(
        total=2**6,
        satisfying=satisfying,
        parity_always_positive=parity_always_positive,
        max_abs_mermin=max_abs_mermin,
    )
    logger.debug("nchv_enumerated", satisfying=satisfying, max_abs=max_abs_mermin)
    return report


def mermin_operator() -> TripleOp:
    """xxx - xyy - yxy - yyx as one Hermitian operator."""
    entries = sum(
        (term.sign * term.observable().entries for term in MERMIN_TERMS),
        start=np.zeros((DIM, DIM), dtype=np.complex128),
    )
    return TripleOp(entries, OpKind.OBSERVABLE)


def mermin_value(rho: DensityMatrix) -> float:
    """Quantum Mermin sum trace(rho M)."""
    return expectation(rho, mermin_operator())


def quantum_max() -> float:
    """Largest eigenvalue of the Mermin operator."""
    return float(mermin_operator().eigenvalues()[-1])
