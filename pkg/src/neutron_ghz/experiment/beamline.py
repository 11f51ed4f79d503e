"""
Beamline Module

Models the interferometer setup as a chain of unitaries on
spin (x) path (x) energy followed by one joint projective measurement.

Preparation: the up-polarised neutron with energy E0 enters the first
interferometer plate, which splits the path into (|I> + |II>)/sqrt(2). An RF
flipper in path II flips the spin and lowers the total energy by one photon
quantum, leaving the GHZ-like state

    (|up, I, E0> + exp(i*phi) |down, II, E0 - hbar*omega>) / sqrt(2)

where phi is the phase of the oscillating field.

Measurement: the spin phase alpha, the path phase chi and the energy phase
gamma rotate each subsystem about z before the analyser selects the joint +1
outcome of sigma_x on all three. This is the same as projecting onto the +1
eigenstates of the in-plane observables at angles (alpha, chi, gamma).
"""

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import structlog

from neutron_ghz.exceptions import InvalidParameterError, InvalidStateError
from neutron_ghz.quantum import (
    IDENTITY,
    Axis,
    DensityMatrix,
    DofIndex,
    MerminTerm,
    OpKind,
    PureState,
    SingleQubitOp,
    TripleOp,
    embed,
    expectation,
    in_plane_observable,
    pauli,
    tensor3,
)

logger = structlog.get_logger(__name__)

TWO_PI: Final[float] = 2.0 * math.pi
DEFAULT_RF_FREQUENCY: Final[float] = 58_000.0
DEFAULT_SOURCE_RATE: Final[float] = 2000.0

_KET_0: Final = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_KET_1: Final = np.array([[0, 0], [0, 1]], dtype=np.complex128)
_HADAMARD: Final = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2.0)


@dataclass(frozen=True)
class BeamlineConfig:
    """
    Static description of the apparatus.

    Attributes:
        rf_frequency: Operating frequency of the first RF flipper in Hz
            (metadata only)
        rf_half_frequency: Frequency of the second RF flipper in Hz
            (metadata only)
        rf_phase: Phase phi of the oscillating field in radians
        source_rate: Expected neutron counts per scan point entering the
            analyser; the detected intensity is source_rate times the
            detection probability
    """

    rf_frequency: float = DEFAULT_RF_FREQUENCY
    rf_half_frequency: float = DEFAULT_RF_FREQUENCY / 2
    rf_phase: float = 0.0
    source_rate: float = DEFAULT_SOURCE_RATE

    def __post_init__(self) -> None:
        if not math.isclose(self.rf_half_frequency, self.rf_frequency / 2):
            msg = (
                f"rf_half_frequency ({self.rf_half_frequency}) must be half of "
                f"rf_frequency ({self.rf_frequency})"
            )
            raise InvalidParameterError(msg)
        if not math.isfinite(self.rf_phase):
            msg = "rf_phase must be finite"
            raise InvalidParameterError(msg)
        if not (math.isfinite(self.source_rate) and self.source_rate >= 0):
            msg = f"source_rate must be a non-negative number, got {self.source_rate}"
            raise InvalidParameterError(msg)


def same_angle(a: float, b: float, tol: float = 1e-9) -> bool:
    """Compare two angles modulo 2*pi."""
    diff = (a - b) % TWO_PI
    return min(diff, TWO_PI - diff) < tol


@dataclass(frozen=True)
class PhaseSettings:
    """Spin phase alpha, path phase chi and energy phase gamma (radians)."""

    alpha: float = 0.0
    chi: float = 0.0
    gamma: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(angle) for angle in self.angles):
            msg = f"Phase settings must be finite, got {self.angles}"
            raise InvalidParameterError(msg)

    @property
    def angles(self) -> tuple[float, float, float]:
        return (self.alpha, self.chi, self.gamma)

    def equivalent(self, other: "PhaseSettings") -> bool:
        return all(
            same_angle(a, b) for a, b in zip(self.angles, other.angles, strict=True)
        )


@dataclass(frozen=True)
class ScanPlan:
    """
    One path-phase scan at fixed spin and energy phases.

    Attributes:
        alpha: Spin phase in radians
        gamma: Energy phase in radians
        chi_grid: Strictly increasing path phases in radians
        counts_per_point: Mean detected counts per point (fringe offset)
        visibility: Fringe visibility of the state being scanned
        seed: Root seed of the counting noise
    """

    alpha: float
    gamma: float
    chi_grid: tuple[float, ...]
    counts_per_point: int = 250
    visibility: float = 1.0
    seed: int = 1

    def __post_init__(self) -> None:
        grid = np.asarray(self.chi_grid, dtype=np.float64)
        if grid.size == 0:
            msg = "chi_grid must not be empty"
            raise InvalidParameterError(msg)
        if np.any(np.diff(grid) <= 0):
            msg = "chi_grid must be strictly increasing"
            raise InvalidParameterError(msg)
        if not 0.0 <= self.visibility <= 1.0:
            msg = f"visibility must lie in [0, 1], got {self.visibility}"
            raise InvalidParameterError(msg)
        if self.counts_per_point <= 0:
            msg = f"counts_per_point must be positive, got {self.counts_per_point}"
            raise InvalidParameterError(msg)
        object.__setattr__(self, "chi_grid", tuple(float(chi) for chi in grid))

    @classmethod
    def uniform(  # noqa: PLR0913
        cls,
        alpha: float,
        gamma: float,
        points: int,
        *,
        counts_per_point: int = 250,
        visibility: float = 1.0,
        seed: int = 1,
    ) -> "ScanPlan":
        """Plan with `points` equally spaced path phases over [0, 2*pi)."""
        grid = np.linspace(0.0, TWO_PI, points, endpoint=False)
        return cls(
            alpha=alpha,
            gamma=gamma,
            chi_grid=tuple(float(chi) for chi in grid),
            counts_per_point=counts_per_point,
            visibility=visibility,
            seed=seed,
        )

    @property
    def source_rate(self) -> float:
        """Neutrons per point such that the fringe mean equals counts_per_point."""
        return 8.0 * self.counts_per_point


def beam_splitter() -> TripleOp:
    """First interferometer plate: |I> -> (|I> + |II>)/sqrt(2)."""
    return embed(SingleQubitOp(_HADAMARD, OpKind.UNITARY), DofIndex.PATH)


def rf_flipper(config: BeamlineConfig) -> TripleOp:
    """
    RF spin flipper placed in path II.

    On path II it maps |up, E0> to exp(i*phi)|down, E0 - hbar*omega> and the
    reverse transition with the conjugate phase; path I is left untouched.
    """
    flip = in_plane_observable(config.rf_phase)
    entries = (
        tensor3(IDENTITY, SingleQubitOp(_KET_0), IDENTITY).entries
        + tensor3(flip, SingleQubitOp(_KET_1), pauli(Axis.X)).entries
    )
    return TripleOp(entries, OpKind.UNITARY)


def prepare_neutron_ghz(config: BeamlineConfig | None = None) -> PureState:
    """Run the incident |up, I, E0> neutron through the splitter and flipper."""
    config = config or BeamlineConfig()
    incident = PureState.basis(0, 0, 0)
    chain = rf_flipper(config) @ beam_splitter()
    state = PureState.normalized(chain.apply(incident))
    logger.debug("neutron_prepared", rf_phase=config.rf_phase)
    return state


def phase_unitary(dof: DofIndex, theta: float) -> TripleOp:
    """diag(1, exp(i*theta)) on one degree of freedom."""
    if not math.isfinite(theta):
        msg = f"Phase must be finite, got {theta}"
        raise InvalidParameterError(msg)
    shifter = SingleQubitOp(np.diag([1.0, np.exp(1j * theta)]), OpKind.UNITARY)
    return embed(shifter, dof)


def _rotated(rho: DensityMatrix, settings: PhaseSettings) -> np.ndarray:
    """Undo the measurement phases so the analyser measures sigma_x."""
    unitary = (
        phase_unitary(DofIndex.SPIN, -settings.alpha)
        @ phase_unitary(DofIndex.PATH, -settings.chi)
        @ phase_unitary(DofIndex.ENERGY, -settings.gamma)
    )
    return unitary.entries @ rho.entries @ unitary.entries.conj().T


def _x_projector(outcome: int) -> np.ndarray:
    return (np.eye(2) + outcome * pauli(Axis.X).entries) / 2


def outcome_probabilities(
    rho: DensityMatrix, settings: PhaseSettings
) -> dict[tuple[int, int, int], float]:
    """Probabilities of the eight joint (+/-, +/-, +/-) analyser outcomes."""
    rotated = _rotated(rho, settings)
    probabilities = {}
    for outcome in itertools.product((1, -1), repeat=3):
        projector = np.kron(
            np.kron(_x_projector(outcome[0]), _x_projector(outcome[1])),
            _x_projector(outcome[2]),
        )
        value = float(np.real(np.trace(rotated @ projector)))
        probabilities[outcome] = float(np.clip(value, 0.0, 1.0))
    return probabilities


def detection_probability(rho: DensityMatrix, settings: PhaseSettings) -> float:
    """
    Probability of the joint +1 outcome at phases (alpha, chi, gamma).

    For the ideal PLUS state this is (1 + cos(alpha + chi + gamma)) / 8.
    """
    rotated = _rotated(rho, settings)
    plus = _x_projector(1)
    projector = np.kron(np.kron(plus, plus), plus)
    value = float(np.real(np.trace(rotated @ projector)))
    return float(np.clip(value, 0.0, 1.0))


def ideal_intensity_curve(
    plan: ScanPlan, rho: DensityMatrix, source_rate: float | None = None
) -> list[tuple[float, float]]:
    """
    Expected detector intensity for every path phase of a scan.

    For a dephased GHZ state with visibility V the curve is
    source_rate * (1 + V cos(alpha + chi + gamma)) / 8.
    """
    rate = plan.source_rate if source_rate is None else source_rate
    return [
        (chi, rate * detection_probability(rho, PhaseSettings(plan.alpha, chi, plan.gamma)))
        for chi in plan.chi_grid
    ]


def fringe_visibility(intensities: Sequence[float]) -> float:
    """(Imax - Imin) / (Imax + Imin) of a sampled curve."""
    values = np.asarray(intensities, dtype=np.float64)
    total = float(values.max() + values.min())
    if total <= 0:
        msg = "Fringe visibility is undefined for a dark curve"
        raise InvalidStateError(msg)
    return float(values.max() - values.min()) / total


def ideal_expectation(rho: DensityMatrix, term: MerminTerm) -> float:
    """Exact trace(rho * sigma sigma sigma) for one Mermin term."""
    return expectation(rho, term.observable())
