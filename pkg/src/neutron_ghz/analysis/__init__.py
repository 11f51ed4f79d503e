"""
Analysis Module

Least-squares fitting of chi scans and extraction of the Mermin sum from the
fitted curves.
"""

from .fitting import (
    FitResult,
    ScanPoint,
    ScanResult,
    fit_sinusoid,
    mean_contrast,
)
from .mermin import (
    Determination,
    ExpectationEstimate,
    MerminReport,
    analyze_fits,
    critical_visibility,
    extract_expectation,
    mermin_from_expectations,
    required_settings,
    signed_sum,
    weighted_average,
)

__all__ = [
    "Determination",
    "ExpectationEstimate",
    "FitResult",
    "MerminReport",
    "ScanPoint",
    "ScanResult",
    "analyze_fits",
    "critical_visibility",
    "extract_expectation",
    "fit_sinusoid",
    "mean_contrast",
    "mermin_from_expectations",
    "required_settings",
    "signed_sum",
    "weighted_average",
]
