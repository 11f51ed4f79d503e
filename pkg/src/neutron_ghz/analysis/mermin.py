"""
Mermin Analysis Module

Turns fitted scans into the four product-observable expectation values of
the Mermin sum and decides whether the noncontextual bound |M| <= 2 is
violated.

For a term with spin axis j, path axis k and energy axis l the base phases
are 0 for x and pi/2 for y. Each scan at spin phase alpha in {base, base+pi}
and energy phase gamma in {base, base+pi} gives one determination, read from
the fitted curve at the path phases beta and beta + pi:

    e = s_alpha * s_gamma * (I(beta) - I(beta+pi)) / (I(beta) + I(beta+pi))

with s = -1 for a pi-shifted setting. All determinations of a term are
combined by an inverse-variance weighted average.
"""

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import structlog

from neutron_ghz.analysis.fitting import FitResult, design_row
from neutron_ghz.exceptions import ExtractionError, InvalidParameterError
from neutron_ghz.experiment.beamline import same_angle
from neutron_ghz.quantum import (
    MERMIN_TERMS,
    NCHV_BOUND,
    QUANTUM_BOUND,
    Axis,
    DofIndex,
    MerminTerm,
)

logger = structlog.get_logger(__name__)

DEFAULT_SIGNIFICANCE: Final[float] = 3.0
BASE_PHASE: Final[dict[Axis, float]] = {Axis.X: 0.0, Axis.Y: math.pi / 2}


@dataclass(frozen=True)
class Determination:
    """One expectation value read off one fitted scan."""

    scan_id: str
    alpha: float
    gamma: float
    value: float
    sigma: float


@dataclass(frozen=True)
class ExpectationEstimate:
    """
    Extracted expectation value of one Mermin product observable.

    Attributes:
        term: The product observable
        value: Weighted mean over all determinations
        sigma: Statistical standard error of value
        provenance: Contributing determinations, in input order
    """

    term: MerminTerm
    value: float
    sigma: float
    provenance: tuple[Determination, ...] = ()

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            msg = f"Expectation value of {self.term.label} is not finite"
            raise InvalidParameterError(msg)
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            msg = f"Standard error of {self.term.label} must be non-negative"
            raise InvalidParameterError(msg)


@dataclass(frozen=True)
class MerminReport:
    """
    The Mermin sum assembled from four expectation values.

    nchv_violated is |M| > 2 + significance_k * sigma_m.
    """

    estimates: tuple[ExpectationEstimate, ...]
    m_value: float
    sigma_m: float
    significance_k: float
    nchv_violated: bool

    nchv_bound: float = NCHV_BOUND
    quantum_bound: float = QUANTUM_BOUND

    def estimate(self, term: MerminTerm) -> ExpectationEstimate:
        for estimate in self.estimates:
            if estimate.term == term:
                return estimate
        msg = f"No estimate for term {term.label}"
        raise KeyError(msg)


def weighted_average(
    values: Sequence[float], sigmas: Sequence[float]
) -> tuple[float, float]:
    """Inverse-variance weighted mean and its standard error."""
    if len(values) == 0:
        msg = "Cannot average an empty list"
        raise InvalidParameterError(msg)
    if len(values) != len(sigmas):
        msg = f"Got {len(values)} values but {len(sigmas)} sigmas"
        raise InvalidParameterError(msg)
    sigma_array = np.asarray(sigmas, dtype=np.float64)
    if np.any(~(sigma_array > 0)):
        msg = "All sigmas must be positive"
        raise InvalidParameterError(msg)
    weights = 1.0 / sigma_array**2
    mean = float(np.sum(weights * np.asarray(values, dtype=np.float64)) / weights.sum())
    return mean, float(1.0 / math.sqrt(weights.sum()))


def signed_sum(values: Sequence[float]) -> float:
    """xxx - xyy - yxy - yyx for values given in MERMIN_TERMS order."""
    return sum(term.sign * value for term, value in zip(MERMIN_TERMS, values, strict=True))


def _outcome_sign(angle: float, base: float) -> int | None:
    if same_angle(angle, base):
        return 1
    if same_angle(angle, base + math.pi):
        return -1
    return None


def _determine(fit: FitResult, beta: float, sign: int) -> Determination:
    plus = fit.intensity(beta)
    minus = fit.intensity(beta + math.pi)
    total = plus + minus
    if total <= 0:
        msg = f"Scan {fit.scan_id!r}: I(beta) + I(beta+pi) = {total} <= 0, fit is corrupt"
        raise ExtractionError(msg)
    value = sign * (plus - minus) / total

    d_plus = design_row(beta)
    d_minus = design_row(beta + math.pi)
    # de/dI+ = 2 I- / S^2 and de/dI- = -2 I+ / S^2
    gradient = sign * (2.0 * minus * d_plus - 2.0 * plus * d_minus) / total**2
    variance = float(gradient @ fit.linear_covariance @ gradient)
    return Determination(
        scan_id=fit.scan_id,
        alpha=fit.alpha,
        gamma=fit.gamma,
        value=value,
        sigma=math.sqrt(max(variance, 0.0)),
    )


def required_settings(term: MerminTerm) -> list[tuple[float, float]]:
    """The four (alpha, gamma) settings that determine a term."""
    alpha = BASE_PHASE[term.axis(DofIndex.SPIN)]
    gamma = BASE_PHASE[term.axis(DofIndex.ENERGY)]
    return [
        (alpha + da, gamma + dg) for da in (0.0, math.pi) for dg in (0.0, math.pi)
    ]


def extract_expectation(
    fits: Iterable[FitResult], term: MerminTerm
) -> ExpectationEstimate:
    """
    Estimate E[sigma sigma sigma] for one term from fitted scans.

    Every fit whose (alpha, gamma) matches one of the term's four settings
    modulo 2*pi contributes one determination; repeated scans of a setting
    all contribute. Raises ExtractionError if any of the four settings has no
    fit.
    """
    alpha_base = BASE_PHASE[term.axis(DofIndex.SPIN)]
    gamma_base = BASE_PHASE[term.axis(DofIndex.ENERGY)]
    beta = BASE_PHASE[term.axis(DofIndex.PATH)]

    determinations: list[Determination] = []
    seen: set[tuple[int, int]] = set()
    for fit in fits:
        s_alpha = _outcome_sign(fit.alpha, alpha_base)
        s_gamma = _outcome_sign(fit.gamma, gamma_base)
        if s_alpha is None or s_gamma is None:
            continue
        seen.add((s_alpha, s_gamma))
        determinations.append(_determine(fit, beta, s_alpha * s_gamma))

    missing = {(1, 1), (1, -1), (-1, 1), (-1, -1)} - seen
    if missing:
        settings = sorted(
            (alpha_base + (0 if sa == 1 else math.pi), gamma_base + (0 if sg == 1 else math.pi))
            for sa, sg in missing
        )
        msg = f"Missing scans for term {term.label} at (alpha, gamma) = {settings}"
        raise ExtractionError(msg)

    value, sigma = weighted_average(
        [d.value for d in determinations], [d.sigma for d in determinations]
    )
    logger.debug(
        "expectation_extracted",
        term=term.label,
        value=value,
        sigma=sigma,
        determinations=len(determinations),
    )
    return ExpectationEstimate(
        term=term, value=value, sigma=sigma, provenance=tuple(determinations)
    )


def mermin_from_expectations(
    estimates: Iterable[ExpectationEstimate],
    significance_k: float = DEFAULT_SIGNIFICANCE,
) -> MerminReport:
    """
    Combine one estimate per Mermin term into M and its standard error.

    sigma_M is the quadrature sum of the four sigmas.
    """
    by_label: dict[str, ExpectationEstimate] = {}
    for estimate in estimates:
        label = estimate.term.label
        if label in by_label:
            msg = f"Duplicate estimate for term {label}"
            raise ExtractionError(msg)
        by_label[label] = estimate
    missing = [term.label for term in MERMIN_TERMS if term.label not in by_label]
    if missing:
        msg = f"Missing estimates for terms {missing}"
        raise ExtractionError(msg)
    if len(by_label) != len(MERMIN_TERMS):
        extra = sorted(set(by_label) - {term.label for term in MERMIN_TERMS})
        msg = f"Unknown Mermin terms {extra}"
        raise ExtractionError(msg)

    ordered = tuple(by_label[term.label] for term in MERMIN_TERMS)
    m_value = signed_sum([estimate.value for estimate in ordered])
    sigma_m = math.sqrt(sum(estimate.sigma**2 for estimate in ordered))
    violated = abs(m_value) > NCHV_BOUND + significance_k * sigma_m
    return MerminReport(
        estimates=ordered,
        m_value=m_value,
        sigma_m=sigma_m,
        significance_k=significance_k,
        nchv_violated=violated,
    )


def analyze_fits(
    fits: Sequence[FitResult], significance_k: float = DEFAULT_SIGNIFICANCE
) -> MerminReport:
    """Extract all four terms from one set of fits and build the report."""
    estimates = [extract_expectation(fits, term) for term in MERMIN_TERMS]
    return mermin_from_expectations(estimates, significance_k)


def critical_visibility() -> float:
    """Visibility below which M = 4V cannot exceed the noncontextual bound."""
    return NCHV_BOUND / QUANTUM_BOUND
