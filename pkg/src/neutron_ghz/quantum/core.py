"""
Quantum Core Module

Exact dense linear algebra for the three two-level degrees of freedom of a
single neutron: spin, path and total energy. The Hilbert space is fixed to
eight dimensions with a spin-major basis ordering,

    b = 4*s + 2*p + e,    s, p, e in {0, 1}

where s=0 is spin up, p=0 is path I and e=0 is the energy E0 (s=1 spin down,
p=1 path II, e=1 the energy E0 - hbar*omega). Every other module relies on
this ordering.

All values are immutable after construction and every operation is a pure
function, so instances can be shared freely between threads.
"""

from dataclasses import dataclass
from enum import Enum, Flag, auto
from typing import ClassVar, Final, Self

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from neutron_ghz.exceptions import InvalidParameterError, InvalidStateError

logger = structlog.get_logger(__name__)

type ComplexMatrix = NDArray[np.complex128]
type ComplexVector = NDArray[np.complex128]

DIM: Final[int] = 8
CONSTRUCTION_TOL: Final[float] = 1e-12
DERIVED_TOL: Final[float] = 1e-10
NORMALIZATION_TOL: Final[float] = 1e-8


class DofIndex(str, Enum):
    """Degrees of freedom of the neutron in tensor order spin, path, energy."""

    SPIN = "spin"
    PATH = "path"
    ENERGY = "energy"

    @property
    def position(self) -> int:
        """Position of the subsystem in the Kronecker product."""
        return _DOF_ORDER.index(self)


_DOF_ORDER: Final[tuple[DofIndex, ...]] = (
    DofIndex.SPIN,
    DofIndex.PATH,
    DofIndex.ENERGY,
)


class Axis(str, Enum):
    """Pauli axes."""

    X = "x"
    Y = "y"
    Z = "z"


class OpKind(Flag):
    """Tags checked when an operator is constructed."""

    GENERAL = 0
    UNITARY = auto()
    OBSERVABLE = auto()


def _as_matrix(entries: ArrayLike, dim: int) -> ComplexMatrix:
    matrix = np.array(entries, dtype=np.complex128)
    if matrix.shape != (dim, dim):
        msg = f"Expected a {dim}x{dim} matrix, got shape {matrix.shape}"
        raise InvalidStateError(msg)
    matrix.setflags(write=False)
    return matrix


def is_hermitian(matrix: ComplexMatrix, tol: float = CONSTRUCTION_TOL) -> bool:
    return bool(np.allclose(matrix, matrix.conj().T, rtol=0.0, atol=tol))


def is_unitary(matrix: ComplexMatrix, tol: float = CONSTRUCTION_TOL) -> bool:
    identity = np.eye(matrix.shape[0], dtype=np.complex128)
    return bool(np.allclose(matrix.conj().T @ matrix, identity, rtol=0.0, atol=tol))


@dataclass(frozen=True, eq=False)
class _Operator:
    """Square complex matrix with optional unitary/observable tags."""

    entries: ComplexMatrix
    kind: OpKind = OpKind.GENERAL

    dim: ClassVar[int]

    def __post_init__(self) -> None:
        matrix = _as_matrix(self.entries, self.dim)
        object.__setattr__(self, "entries", matrix)
        if OpKind.UNITARY in self.kind and not is_unitary(matrix):
            msg = f"{type(self).__name__} tagged unitary but U^dagger U != I"
            raise InvalidStateError(msg)
        if OpKind.OBSERVABLE in self.kind and not is_hermitian(matrix):
            msg = f"{type(self).__name__} tagged observable but not Hermitian"
            raise InvalidStateError(msg)

    def __matmul__(self, other: Self) -> Self:
        kind = self.kind & other.kind & OpKind.UNITARY
        return type(self)(self.entries @ other.entries, kind)

    def __add__(self, other: Self) -> Self:
        kind = self.kind & other.kind & OpKind.OBSERVABLE
        return type(self)(self.entries + other.entries, kind)

    def __sub__(self, other: Self) -> Self:
        kind = self.kind & other.kind & OpKind.OBSERVABLE
        return type(self)(self.entries - other.entries, kind)

    def __neg__(self) -> Self:
        return type(self)(-self.entries, self.kind)

    def scaled(self, factor: float) -> Self:
        """Multiply by a real factor; keeps the observable tag only."""
        return type(self)(factor * self.entries, self.kind & OpKind.OBSERVABLE)

    def dagger(self) -> Self:
        return type(self)(self.entries.conj().T, self.kind)

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def is_hermitian(self, tol: float = CONSTRUCTION_TOL) -> bool:
        return is_hermitian(self.entries, tol)

    def is_unitary(self, tol: float = CONSTRUCTION_TOL) -> bool:
        return is_unitary(self.entries, tol)

    def eigenvalues(self) -> NDArray[np.float64]:
        """Ascending eigenvalues of a Hermitian operator."""
        if not self.is_hermitian():
            msg = "Eigenvalues are only defined here for Hermitian operators"
            raise InvalidStateError(msg)
        return np.linalg.eigvalsh(self.entries)

    def allclose(self, other: Self, tol: float = CONSTRUCTION_TOL) -> bool:
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=tol))


@dataclass(frozen=True, eq=False)
class SingleQubitOp(_Operator):
    """Operator on one two-level degree of freedom."""

    dim: ClassVar[int] = 2


@dataclass(frozen=True, eq=False)
class TripleOp(_Operator):
    """Operator on spin (x) path (x) energy."""

    dim: ClassVar[int] = DIM

    def apply(self, psi: "PureState") -> ComplexVector:
        """Return O|psi> as a raw amplitude vector (not renormalised)."""
        return self.entries @ psi.amplitudes


def commutator(a: TripleOp, b: TripleOp) -> TripleOp:
    return TripleOp(a.entries @ b.entries - b.entries @ a.entries)


@dataclass(frozen=True, eq=False)
class PureState:
    """
    Normalised state vector of one neutron.

    Attributes:
        amplitudes: Eight complex amplitudes in spin-major basis order
    """

    amplitudes: ComplexVector

    def __post_init__(self) -> None:
        vector = np.array(self.amplitudes, dtype=np.complex128)
        if vector.shape != (DIM,):
            msg = f"PureState needs {DIM} amplitudes, got shape {vector.shape}"
            raise InvalidStateError(msg)
        norm = float(np.linalg.norm(vector))
        if abs(norm - 1.0) > CONSTRUCTION_TOL:
            msg = f"PureState is not normalised (norm={norm!r})"
            raise InvalidStateError(msg)
        vector.setflags(write=False)
        object.__setattr__(self, "amplitudes", vector)

    @classmethod
    def basis(cls, spin: int, path: int, energy: int) -> Self:
        """Product basis state |s, p, e>."""
        vector = np.zeros(DIM, dtype=np.complex128)
        vector[basis_index(spin, path, energy)] = 1.0
        return cls(vector)

    @classmethod
    def normalized(cls, amplitudes: ArrayLike) -> Self:
        vector = np.asarray(amplitudes, dtype=np.complex128)
        norm = float(np.linalg.norm(vector))
        if norm == 0.0:
            msg = "Cannot normalise the zero vector"
            raise InvalidStateError(msg)
        return cls(vector / norm)

    def inner(self, other: "PureState") -> complex:
        """<self|other>"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "PureState") -> float:
        return abs(self.inner(other)) ** 2


def basis_index(spin: int, path: int, energy: int) -> int:
    for label in (spin, path, energy):
        if label not in (0, 1):
            msg = f"Basis labels must be 0 or 1, got {label}"
            raise InvalidParameterError(msg)
    return 4 * spin + 2 * path + energy


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """
    Mixed state of one neutron: Hermitian, unit trace, positive semidefinite.

    Attributes:
        entries: 8x8 complex matrix in spin-major basis order
    """

    entries: ComplexMatrix

    min_eigenvalue: ClassVar[float] = -DERIVED_TOL

    def __post_init__(self) -> None:
        matrix = _as_matrix(self.entries, DIM)
        if not is_hermitian(matrix):
            msg = "DensityMatrix is not Hermitian"
            raise InvalidStateError(msg)
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > CONSTRUCTION_TOL:
            msg = f"DensityMatrix trace is {trace!r}, expected 1"
            raise InvalidStateError(msg)
        lowest = float(np.linalg.eigvalsh(matrix)[0])
        if lowest < self.min_eigenvalue:
            msg = f"DensityMatrix has negative eigenvalue {lowest!r}"
            raise InvalidStateError(msg)
        object.__setattr__(self, "entries", matrix)

    @classmethod
    def maximally_mixed(cls) -> Self:
        return cls(np.eye(DIM, dtype=np.complex128) / DIM)

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))

    def mix(self, other: "DensityMatrix", weight: float) -> "DensityMatrix":
        """weight * self + (1 - weight) * other"""
        if not 0.0 <= weight <= 1.0:
            msg = f"Mixing weight must lie in [0, 1], got {weight}"
            raise InvalidParameterError(msg)
        return DensityMatrix(weight * self.entries + (1.0 - weight) * other.entries)

    def allclose(self, other: "DensityMatrix", tol: float = DERIVED_TOL) -> bool:
        return bool(np.allclose(self.entries, other.entries, rtol=0.0, atol=tol))


_PAULI: Final[dict[Axis, ComplexMatrix]] = {
    Axis.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    Axis.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    Axis.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

BOTH: Final[OpKind] = OpKind.UNITARY | OpKind.OBSERVABLE

IDENTITY: Final[SingleQubitOp] = SingleQubitOp(np.eye(2), BOTH)


def pauli(axis: Axis) -> SingleQubitOp:
    """Standard Pauli matrix for the given axis."""
    return SingleQubitOp(_PAULI[Axis(axis)], BOTH)


def in_plane_observable(theta: float) -> SingleQubitOp:
    """
    cos(theta) sigma_x + sin(theta) sigma_y.

    theta = 0 gives sigma_x and theta = pi/2 gives sigma_y; the eigenvalues
    are always +1 and -1.
    """
    if not np.isfinite(theta):
        msg = f"Measurement angle must be finite, got {theta}"
        raise InvalidParameterError(msg)
    entries = np.cos(theta) * _PAULI[Axis.X] + np.sin(theta) * _PAULI[Axis.Y]
    return SingleQubitOp(entries, BOTH)


def tensor3(a: SingleQubitOp, b: SingleQubitOp, c: SingleQubitOp) -> TripleOp:
    """Kronecker product in the fixed order spin (x) path (x) energy."""
    entries = np.kron(np.kron(a.entries, b.entries), c.entries)
    return TripleOp(entries, a.kind & b.kind & c.kind)


def embed(op: SingleQubitOp, dof: DofIndex) -> TripleOp:
    """Act with op on one degree of freedom and with the identity elsewhere."""
    factors = [IDENTITY, IDENTITY, IDENTITY]
    factors[DofIndex(dof).position] = op
    return tensor3(*factors)


def expectation(rho: DensityMatrix, obs: TripleOp) -> float:
    """trace(rho * obs) for a Hermitian observable."""
    if not obs.is_hermitian():
        msg = "Expectation values need a Hermitian observable"
        raise InvalidStateError(msg)
    value = complex(np.trace(rho.entries @ obs.entries))
    if abs(value.imag) > DERIVED_TOL:
        logger.warning("expectation_not_real", imag=value.imag)
    return value.real


def densify(psi: PureState | ArrayLike) -> DensityMatrix:
    """Rank-one projector |psi><psi|."""
    if isinstance(psi, PureState):
        vector = psi.amplitudes
    else:
        vector = np.asarray(psi, dtype=np.complex128)
        deviation = abs(float(np.linalg.norm(vector)) - 1.0)
        if deviation > NORMALIZATION_TOL:
            msg = f"Cannot densify an unnormalised state (norm deviation {deviation})"
            raise InvalidStateError(msg)
        vector = PureState.normalized(vector).amplitudes
    return DensityMatrix(np.outer(vector, vector.conj()))


@dataclass(frozen=True)
class ObservableSpec:
    """One in-plane measurement angle per degree of freedom."""

    spin: float = 0.0
    path: float = 0.0
    energy: float = 0.0

    @property
    def angles(self) -> tuple[float, float, float]:
        return (self.spin, self.path, self.energy)

    def observable(self) -> TripleOp:
        return tensor3(*(in_plane_observable(theta) for theta in self.angles))
