"""Simulated indoor NLoS backscatter-tag localization laboratory."""

from ._core import (  # noqa: F401
    ArrayConfig,
    CompareResult,
    Estimator,
    FmcwConfig,
    Modulation,
    MethodSpec,
    Point2D,
    ScenarioConfig,
    ScenarioResult,
    SweepResult,
    TrialRecord,
    beat_frequency,
    compare_report,
    correlation_profile,
    generate_code,
    load_config,
    parse_config,
    run_scenario,
    run_trial,
    sweep,
    trials_to_csv,
    virtual_target_position,
    wls_multilaterate,
)

__all__ = [
    "ArrayConfig",
    "CompareResult",
    "Estimator",
    "FmcwConfig",
    "Modulation",
    "MethodSpec",
    "Point2D",
    "ScenarioConfig",
    "ScenarioResult",
    "SweepResult",
    "TrialRecord",
    "beat_frequency",
    "compare_report",
    "correlation_profile",
    "generate_code",
    "load_config",
    "parse_config",
    "run_scenario",
    "run_trial",
    "sweep",
    "trials_to_csv",
    "virtual_target_position",
    "wls_multilaterate",
]
