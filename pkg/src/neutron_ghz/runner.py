"""
Experiment Runner Module

Drives a complete simulated Mermin experiment: prepare and degrade the
neutron state, scan the path phase chi at all 16 combinations of the spin
phase alpha and the energy phase gamma in {0, pi/2, pi, 3pi/2}, fit every
scan and assemble the Mermin report.

Every repeat of every scan draws from its own random stream with
stream_id = scan_index * repeats + repeat, so results do not depend on the
order in which scans are simulated.
"""

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Final

import numpy as np
import structlog

from neutron_ghz.analysis import (
    FitResult,
    MerminReport,
    ScanPoint,
    ScanResult,
    analyze_fits,
    fit_sinusoid,
    mean_contrast,
)
from neutron_ghz.config import RunConfig
from neutron_ghz.exceptions import InvalidParameterError
from neutron_ghz.experiment import (
    BeamlineConfig,
    RngStream,
    ScanPlan,
    apply_noise,
    ideal_intensity_curve,
    poisson_counts,
    prepare_neutron_ghz,
)
from neutron_ghz.quantum import DensityMatrix, densify, mermin_value

logger = structlog.get_logger(__name__)

SCAN_PHASES: Final[tuple[float, ...]] = (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)

Curve = list[tuple[float, float]]


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    """
    Everything one `mermin` run produces.

    Attributes:
        config: The run configuration
        scans: Simulated scans, ordered by (alpha, gamma, repeat)
        fits: One fit per scan, same order
        report: Extracted expectation values and the Mermin sum
        contrast: Mean fitted fringe contrast over all scans
        exact_m: trace(rho M) of the simulated state
    """

    config: RunConfig
    scans: tuple[ScanResult, ...]
    fits: tuple[FitResult, ...]
    report: MerminReport
    contrast: float
    exact_m: float


def prepare_state(config: RunConfig) -> DensityMatrix:
    """Ideal neutron GHZ state degraded to the configured visibility."""
    beamline = BeamlineConfig(
        rf_phase=config.rf_phase, source_rate=8.0 * config.counts_per_point
    )
    pure = densify(prepare_neutron_ghz(beamline))
    return apply_noise(pure, config.noise_model, config.visibility)


def scan_settings() -> list[tuple[float, float]]:
    """The 16 (alpha, gamma) settings, alpha-major."""
    return [(alpha, gamma) for alpha in SCAN_PHASES for gamma in SCAN_PHASES]


def scan_plan(config: RunConfig, alpha: float, gamma: float) -> ScanPlan:
    return ScanPlan.uniform(
        alpha,
        gamma,
        config.points_per_scan,
        counts_per_point=config.counts_per_point,
        visibility=config.visibility,
        seed=config.seed,
    )


def ideal_curves(
    config: RunConfig, rho: DensityMatrix | None = None
) -> dict[tuple[float, float], Curve]:
    """
    Expected intensity curves for all 16 settings.

    Curves depend on the state and the chi grid only, not on the seed, so one
    set can be reused across Monte Carlo repetitions.
    """
    rho = prepare_state(config) if rho is None else rho
    return {
        (alpha, gamma): ideal_intensity_curve(scan_plan(config, alpha, gamma), rho)
        for alpha, gamma in scan_settings()
    }


def simulate_scan(
    plan: ScanPlan,
    curve: Curve,
    stream: RngStream | None,
    scan_id: str = "",
) -> ScanResult:
    """
    Turn an expected curve into a scan.

    With a stream every point is a Poisson draw; without one the counts are
    the expected intensities themselves.
    """
    points = []
    for chi, expected in curve:
        counts = float(expected) if stream is None else poisson_counts(expected, stream)
        points.append(ScanPoint.from_counts(chi, counts, expected_intensity=expected))
    return ScanResult(
        alpha=plan.alpha, gamma=plan.gamma, points=tuple(points), scan_id=scan_id
    )


def run_scan(config: RunConfig, alpha: float, gamma: float) -> ScanResult:
    """A single chi scan, as written by the `scan` subcommand."""
    plan = scan_plan(config, alpha, gamma)
    curve = ideal_intensity_curve(plan, prepare_state(config))
    stream = None if config.noiseless else RngStream(config.seed)
    scan = simulate_scan(plan, curve, stream, scan_id="scan")
    logger.info("scan_simulated", alpha=alpha, gamma=gamma, points=len(scan.points))
    return scan


def _scan_id(alpha: float, gamma: float, repeat: int) -> str:
    def quarter(angle: float) -> int:
        return round(angle / (math.pi / 2)) % 4

    return f"a{quarter(alpha)}g{quarter(gamma)}r{repeat}"


def run_experiment(
    config: RunConfig,
    curves: Mapping[tuple[float, float], Curve] | None = None,
) -> ExperimentResult:
    """
    Simulate, fit and analyse all 16 settings times `repeats` scans.

    Raises FitError or ExtractionError from the analysis, carrying the id of
    the offending scan.
    """
    log = logger.bind(seed=config.seed, visibility=config.visibility)
    rho = prepare_state(config)
    curves = ideal_curves(config, rho) if curves is None else curves
    root = RngStream(config.seed)

    scans: list[ScanResult] = []
    for index, (alpha, gamma) in enumerate(scan_settings()):
        plan = scan_plan(config, alpha, gamma)
        for repeat in range(config.repeats):
            stream = None
            if not config.noiseless:
                stream = root.spawn(index * config.repeats + repeat)
            scans.append(
                simulate_scan(
                    plan, curves[alpha, gamma], stream, _scan_id(alpha, gamma, repeat)
                )
            )

    fits = tuple(fit_sinusoid(scan) for scan in scans)
    report = analyze_fits(fits, config.significance_k)
    result = ExperimentResult(
        config=config,
        scans=tuple(scans),
        fits=fits,
        report=report,
        contrast=mean_contrast(fits),
        exact_m=mermin_value(rho),
    )
    log.info(
        "experiment_analyzed",
        scans=len(scans),
        m_value=report.m_value,
        sigma_m=report.sigma_m,
        nchv_violated=report.nchv_violated,
    )
    return result


def visibility_grid(steps: int) -> list[float]:
    """`steps` equally spaced visibilities from 0 to 1 inclusive."""
    if steps < 2:  # noqa: PLR2004
        msg = f"A sweep needs at least 2 steps, got {steps}"
        raise InvalidParameterError(msg)
    return [float(v) for v in np.linspace(0.0, 1.0, steps)]


def run_sweep(
    config: RunConfig, visibilities: Sequence[float]
) -> list[ExperimentResult]:
    """Repeat the experiment at every visibility, other settings unchanged."""
    results = []
    for visibility in visibilities:
        swept = RunConfig(**{**config.model_dump(), "visibility": visibility})
        results.append(run_experiment(swept))
    logger.info("sweep_finished", points=len(results))
    return results
