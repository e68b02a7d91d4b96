"""Stochastic homogenization experiments for KPP and G-equation fronts."""

from ._homog_lab import (
    ConfigError,
    InvalidSpec,
    NumericalAnomaly,
    __version__,
    canonical_config,
    config_hash,
    emit_defaults,
    evaluate,
    experiment_kinds,
    run,
    speed_table,
    validate,
    wilson_interval,
)

__all__ = [
    "ConfigError",
    "InvalidSpec",
    "NumericalAnomaly",
    "__version__",
    "canonical_config",
    "config_hash",
    "emit_defaults",
    "evaluate",
    "experiment_kinds",
    "run",
    "speed_table",
    "validate",
    "wilson_interval",
]
