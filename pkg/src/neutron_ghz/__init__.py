from neutron_ghz.analysis import (
    MerminReport,
    analyze_fits,
    extract_expectation,
    fit_sinusoid,
)
from neutron_ghz.config import RunConfig, load_run_config
from neutron_ghz.experiment import (
    BeamlineConfig,
    NoiseModel,
    RngStream,
    prepare_neutron_ghz,
)
from neutron_ghz.quantum import (
    DensityMatrix,
    GhzSign,
    MerminTerm,
    PureState,
    ghz_state,
    mermin_value,
)
from neutron_ghz.runner import ExperimentResult, run_experiment

__all__ = [
    "BeamlineConfig",
    "DensityMatrix",
    "ExperimentResult",
    "GhzSign",
    "MerminReport",
    "MerminTerm",
    "NoiseModel",
    "PureState",
    "RngStream",
    "RunConfig",
    "analyze_fits",
    "extract_expectation",
    "fit_sinusoid",
    "ghz_state",
    "load_run_config",
    "mermin_value",
    "prepare_neutron_ghz",
    "run_experiment",
]
