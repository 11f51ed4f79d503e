"""
Sinusoid Fitting Module

Weighted least-squares fit of interferometer scans to

    I(chi) = a0 + a1 cos(chi + phi0)

The model is solved through its linear form a0 + b cos(chi) + c sin(chi),
which has a closed-form, globally optimal solution of the normal equations.
The amplitude and phase follow as a1 = sqrt(b^2 + c^2) and
phi0 = atan2(-c, b); their covariance is propagated to first order.
"""

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import structlog
from numpy.typing import NDArray
from scipy import linalg

from neutron_ghz.exceptions import FitError, InvalidParameterError

logger = structlog.get_logger(__name__)

MIN_POINTS: Final[int] = 5
MAX_CONDITION: Final[float] = 1e12
# a1 below this many standard errors is indistinguishable from a flat scan
AMPLITUDE_SIGNIFICANCE: Final[float] = 2.0


@dataclass(frozen=True)
class ScanPoint:
    """
    One path-phase setting of a scan.

    Attributes:
        chi: Path phase in radians
        counts: Detected counts (a real number in noiseless mode)
        count_error: Standard error of counts, sqrt(max(counts, 1))
        expected_intensity: Noise-free intensity the counts were drawn from,
            when known
    """

    chi: float
    counts: float
    count_error: float
    expected_intensity: float | None = None

    @classmethod
    def from_counts(
        cls, chi: float, counts: float, expected_intensity: float | None = None
    ) -> "ScanPoint":
        if counts < 0:
            msg = f"counts must be non-negative, got {counts}"
            raise InvalidParameterError(msg)
        return cls(
            chi=chi,
            counts=counts,
            count_error=math.sqrt(max(counts, 1.0)),
            expected_intensity=expected_intensity,
        )


@dataclass(frozen=True)
class ScanResult:
    """Ordered samples of one chi scan at fixed spin and energy phases."""

    alpha: float
    gamma: float
    points: tuple[ScanPoint, ...]
    scan_id: str = ""

    def __post_init__(self) -> None:
        n = len(self.points)
        if n < MIN_POINTS:
            msg = f"Scan {self.scan_id!r} has {n} points, need at least {MIN_POINTS}"
            raise InvalidParameterError(msg)
        chis = [point.chi for point in self.points]
        span = max(chis) - min(chis)
        # with its own mean spacing appended the grid must close a full period
        if span + span / (n - 1) < 2 * math.pi - 1e-9:
            msg = f"Scan {self.scan_id!r} does not cover a full 2*pi period of chi"
            raise InvalidParameterError(msg)

    @property
    def chi(self) -> NDArray[np.float64]:
        return np.array([point.chi for point in self.points])

    @property
    def counts(self) -> NDArray[np.float64]:
        return np.array([point.counts for point in self.points], dtype=np.float64)

    @property
    def count_errors(self) -> NDArray[np.float64]:
        return np.array([point.count_error for point in self.points])


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Fitted sinusoid of one scan.

    Attributes:
        offset: a0 in counts
        amplitude: a1 >= 0 in counts
        phase: phi0 in radians, in (-pi, pi]
        covariance: 3x3 covariance of (a0, a1, phi0)
        linear_params: (a0, b, c) of the linear parametrisation
        linear_covariance: 3x3 covariance of (a0, b, c)
        chi2_dof: Reduced chi-square of the fit
        amplitude_identifiable: False when a1 is consistent with zero
        alpha, gamma, scan_id: Provenance of the scan
    """

    offset: float
    amplitude: float
    phase: float
    covariance: NDArray[np.float64]
    linear_params: NDArray[np.float64]
    linear_covariance: NDArray[np.float64]
    chi2_dof: float
    amplitude_identifiable: bool
    alpha: float = 0.0
    gamma: float = 0.0
    scan_id: str = ""

    @property
    def contrast(self) -> float:
        return self.amplitude / self.offset

    @property
    def contrast_sigma(self) -> float:
        gradient = np.array(
            [-self.amplitude / self.offset**2, 1.0 / self.offset, 0.0]
        )
        return math.sqrt(max(float(gradient @ self.covariance @ gradient), 0.0))

    def intensity(self, chi: float) -> float:
        return float(self.linear_params @ design_row(chi))

    def sigma(self, name: str) -> float:
        index = ("offset", "amplitude", "phase").index(name)
        return math.sqrt(self.covariance[index, index])


def design_row(chi: float) -> NDArray[np.float64]:
    return np.array([1.0, math.cos(chi), math.sin(chi)])


def _design(chi: Sequence[float] | NDArray[np.float64]) -> NDArray[np.float64]:
    chi = np.asarray(chi, dtype=np.float64)
    return np.column_stack([np.ones_like(chi), np.cos(chi), np.sin(chi)])


def fit_sinusoid(scan: ScanResult) -> FitResult:
    """
    Weighted least-squares fit of a0 + a1 cos(chi + phi0) to one scan.

    Weights are 1/count_error^2. Raises FitError when the design matrix is
    degenerate (for example every chi equal modulo 2*pi). A flat scan is
    still fitted but comes back with amplitude_identifiable=False.
    """
    log = logger.bind(scan=scan.scan_id)
    design = _design(scan.chi)
    weights = 1.0 / scan.count_errors**2
    normal = design.T @ (weights[:, None] * design)
    rhs = design.T @ (weights * scan.counts)

    if np.linalg.cond(normal) > MAX_CONDITION:
        msg = f"Degenerate design matrix for scan {scan.scan_id!r}"
        raise FitError(msg)
    try:
        factor = linalg.cho_factor(normal)
    except linalg.LinAlgError as e:
        msg = f"Normal equations of scan {scan.scan_id!r} are not positive definite"
        raise FitError(msg) from e

    params = linalg.cho_solve(factor, rhs)
    linear_cov = linalg.cho_solve(factor, np.eye(3))
    linear_cov = (linear_cov + linear_cov.T) / 2

    residuals = scan.counts - design @ params
    dof = max(len(scan.points) - 3, 1)
    chi2_dof = float(np.sum(weights * residuals**2)) / dof

    a0, b, c = (float(value) for value in params)
    amplitude = math.hypot(b, c)
    phase = math.atan2(-c, b)
    if amplitude > 0:
        jacobian = np.array(
            [
                [1.0, 0.0, 0.0],
                [0.0, b / amplitude, c / amplitude],
                [0.0, c / amplitude**2, -b / amplitude**2],
            ]
        )
    else:
        jacobian = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
    covariance = jacobian @ linear_cov @ jacobian.T

    amplitude_scale = math.sqrt((linear_cov[1, 1] + linear_cov[2, 2]) / 2)
    identifiable = amplitude > AMPLITUDE_SIGNIFICANCE * amplitude_scale
    if not identifiable:
        log.warning("fit_amplitude_unidentifiable", amplitude=amplitude)
    if a0 <= 0:
        log.warning("fit_offset_not_positive", offset=a0)

    return FitResult(
        offset=a0,
        amplitude=amplitude,
        phase=phase,
        covariance=covariance,
        linear_params=params,
        linear_covariance=linear_cov,
        chi2_dof=chi2_dof,
        amplitude_identifiable=identifiable,
        alpha=scan.alpha,
        gamma=scan.gamma,
        scan_id=scan.scan_id,
    )


def mean_contrast(fits: Sequence[FitResult]) -> float:
    """Arithmetic mean of the fitted fringe contrasts a1/a0."""
    if not fits:
        msg = "No fits to average"
        raise InvalidParameterError(msg)
    return float(np.mean([fit.contrast for fit in fits]))
