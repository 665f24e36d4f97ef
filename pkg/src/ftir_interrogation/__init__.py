"""Single-photon quantum interrogation through frustrated total internal reflection."""

__version__ = "0.1.0"

from .errors import ConfigError, DomainError, InterrogationError, SingularityError
from .optics import (
    OpticalStack,
    SplitAmplitudes,
    TunnelingIndex,
    critical_angle,
    detection_probabilities,
    evanescent_amplitude,
    gap_for_damage_ratio,
    penetration_depth,
    split_amplitudes,
    vacuum_to_medium_wavelength,
)
from .simulation import (
    EnsembleResult,
    ObjectKind,
    RunRecord,
    TrialConfig,
    efficiency_comparison,
    ev_baseline,
    simulate_ensemble,
    simulate_run,
)
from .source import (
    BackgroundModel,
    Distribution,
    SourceModel,
    effective_detected_rate,
    sample_herald_count,
    sample_herald_counts,
)
from .stats import (
    ExperimentPlan,
    TestOutcome,
    empirical_power,
    plan_sample_size,
    reject_null,
    t_statistic,
    t_statistic_two_step,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "InterrogationError",
    "SingularityError",
    "OpticalStack",
    "SplitAmplitudes",
    "TunnelingIndex",
    "critical_angle",
    "detection_probabilities",
    "evanescent_amplitude",
    "gap_for_damage_ratio",
    "penetration_depth",
    "split_amplitudes",
    "vacuum_to_medium_wavelength",
    "EnsembleResult",
    "ObjectKind",
    "RunRecord",
    "TrialConfig",
    "efficiency_comparison",
    "ev_baseline",
    "simulate_ensemble",
    "simulate_run",
    "BackgroundModel",
    "Distribution",
    "SourceModel",
    "effective_detected_rate",
    "sample_herald_count",
    "sample_herald_counts",
    "ExperimentPlan",
    "TestOutcome",
    "empirical_power",
    "plan_sample_size",
    "reject_null",
    "t_statistic",
    "t_statistic_two_step",
]
