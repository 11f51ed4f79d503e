import math

import numpy as np
import pytest

from neutron_ghz.analysis import (
    ExpectationEstimate,
    FitResult,
    ScanPoint,
    ScanResult,
    critical_visibility,
    extract_expectation,
    fit_sinusoid,
    mermin_from_expectations,
    required_settings,
    signed_sum,
    weighted_average,
)
from neutron_ghz.exceptions import ExtractionError, InvalidParameterError
from neutron_ghz.experiment import ScanPlan, ghz_dephase, ideal_intensity_curve
from neutron_ghz.quantum import MERMIN_TERMS, DensityMatrix, MerminTerm

XXX, XYY, YXY, YYX = MERMIN_TERMS


def estimates(values: list[float], sigma: float) -> list[ExpectationEstimate]:
    return [
        ExpectationEstimate(term=term, value=value, sigma=sigma)
        for term, value in zip(MERMIN_TERMS, values, strict=True)
    ]


def noiseless_fits(
    rho: DensityMatrix, settings: list[tuple[float, float]]
) -> list[FitResult]:
    fits = []
    for index, (alpha, gamma) in enumerate(settings):
        plan = ScanPlan.uniform(alpha, gamma, 24)
        points = tuple(
            ScanPoint.from_counts(chi, intensity, intensity)
            for chi, intensity in ideal_intensity_curve(plan, rho)
        )
        scan = ScanResult(alpha=alpha, gamma=gamma, points=points, scan_id=f"s{index}")
        fits.append(fit_sinusoid(scan))
    return fits


def test_measured_values_combine_to_headline_number() -> None:
    report = mermin_from_expectations(estimates([0.659, -0.632, -0.603, -0.664], 0.002))
    assert report.m_value == pytest.approx(2.558, abs=1e-12)
    assert report.sigma_m == pytest.approx(0.004, abs=1e-12)
    assert report.nchv_violated
    assert report.nchv_bound == 2.0
    assert report.quantum_bound == 4.0


def test_ideal_values_reach_quantum_bound() -> None:
    report = mermin_from_expectations(estimates([1.0, -1.0, -1.0, -1.0], 0.0))
    assert report.m_value == 4.0
    assert report.sigma_m == 0.0
    assert report.nchv_violated


def test_violation_needs_significance() -> None:
    report = mermin_from_expectations(
        estimates([0.55, -0.55, -0.55, -0.55], 0.05), significance_k=3.0
    )
    assert report.m_value == pytest.approx(2.2)
    assert not report.nchv_violated
    lenient = mermin_from_expectations(
        estimates([0.55, -0.55, -0.55, -0.55], 0.05), significance_k=1.0
    )
    assert lenient.nchv_violated


def test_estimates_must_be_complete_and_unique() -> None:
    full = estimates([0.6, -0.6, -0.6, -0.6], 0.01)
    with pytest.raises(ExtractionError, match="Missing estimates"):
        mermin_from_expectations(full[:3])
    with pytest.raises(ExtractionError, match="Duplicate"):
        mermin_from_expectations([*full, full[0]])


def test_estimate_values_are_checked() -> None:
    with pytest.raises(InvalidParameterError, match="not finite"):
        ExpectationEstimate(term=XXX, value=math.nan, sigma=0.1)
    with pytest.raises(InvalidParameterError, match="non-negative"):
        ExpectationEstimate(term=XXX, value=0.5, sigma=-0.1)


def test_weighted_average() -> None:
    mean, sigma = weighted_average([1.0, 3.0], [1.0, 1.0])
    assert mean == pytest.approx(2.0)
    assert sigma == pytest.approx(1 / math.sqrt(2))
    mean, _ = weighted_average([1.0, 3.0], [1.0, 2.0])
    assert mean == pytest.approx(1.4)
    with pytest.raises(InvalidParameterError, match="positive"):
        weighted_average([1.0], [0.0])
    with pytest.raises(InvalidParameterError, match="empty"):
        weighted_average([], [])


def test_signed_sum_order() -> None:
    assert signed_sum([1.0, 2.0, 3.0, 4.0]) == 1.0 - 2.0 - 3.0 - 4.0


def test_required_settings() -> None:
    half = math.pi / 2
    np.testing.assert_allclose(
        required_settings(XXX),
        [(0.0, 0.0), (0.0, math.pi), (math.pi, 0.0), (math.pi, math.pi)],
    )
    np.testing.assert_allclose(
        required_settings(XYY),
        [(0.0, half), (0.0, 3 * half), (math.pi, half), (math.pi, 3 * half)],
    )
    np.testing.assert_allclose(
        required_settings(YYX),
        [(half, 0.0), (half, math.pi), (3 * half, 0.0), (3 * half, math.pi)],
    )


@pytest.mark.parametrize("term", MERMIN_TERMS, ids=lambda term: term.label)
def test_extraction_matches_dephased_state(
    plus_rho: DensityMatrix, term: MerminTerm
) -> None:
    visibility = 0.8
    fits = noiseless_fits(ghz_dephase(plus_rho, visibility), required_settings(term))
    estimate = extract_expectation(fits, term)
    assert estimate.value == pytest.approx(term.sign * visibility, abs=1e-9)
    assert estimate.sigma > 0
    assert len(estimate.provenance) == 4


def test_settings_are_matched_modulo_two_pi(plus_rho: DensityMatrix) -> None:
    shifted = [
        (alpha + 2 * math.pi, gamma - 2 * math.pi)
        for alpha, gamma in required_settings(XXX)
    ]
    estimate = extract_expectation(noiseless_fits(plus_rho, shifted), XXX)
    assert estimate.value == pytest.approx(1.0, abs=1e-9)


def test_unrelated_scans_are_ignored(plus_rho: DensityMatrix) -> None:
    settings = [*required_settings(XXX), (math.pi / 2, math.pi / 2)]
    estimate = extract_expectation(noiseless_fits(plus_rho, settings), XXX)
    assert len(estimate.provenance) == 4


def test_missing_setting_raises(plus_rho: DensityMatrix) -> None:
    fits = noiseless_fits(plus_rho, required_settings(YXY)[:3])
    with pytest.raises(ExtractionError, match="Missing scans for term yxy"):
        extract_expectation(fits, YXY)


def test_critical_visibility() -> None:
    assert critical_visibility() == 0.5
