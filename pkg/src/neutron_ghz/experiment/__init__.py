"""
Experiment Module

The simulated apparatus: state preparation and phase-resolved detection in
`beamline`, contrast loss and counting statistics in `noise`.
"""

from .beamline import (
    BeamlineConfig,
    PhaseSettings,
    ScanPlan,
    beam_splitter,
    detection_probability,
    fringe_visibility,
    ideal_expectation,
    ideal_intensity_curve,
    outcome_probabilities,
    phase_unitary,
    prepare_neutron_ghz,
    rf_flipper,
    same_angle,
)
from .noise import (
    DEFAULT_VISIBILITY,
    NoiseModel,
    RngStream,
    VisibilityModel,
    apply_noise,
    depolarize,
    ghz_dephase,
    poisson_counts,
)

__all__ = [
    "DEFAULT_VISIBILITY",
    "BeamlineConfig",
    "NoiseModel",
    "PhaseSettings",
    "RngStream",
    "ScanPlan",
    "VisibilityModel",
    "apply_noise",
    "beam_splitter",
    "depolarize",
    "detection_probability",
    "fringe_visibility",
    "ghz_dephase",
    "ideal_expectation",
    "ideal_intensity_curve",
    "outcome_probabilities",
    "phase_unitary",
    "poisson_counts",
    "prepare_neutron_ghz",
    "rf_flipper",
    "same_angle",
]
