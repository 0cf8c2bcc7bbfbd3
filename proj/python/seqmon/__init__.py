"""Sequential monitoring of linear regressions with an autoregressive term."""

from seqmon._core import (
    ConfigError,
    DataError,
    DegenerateVarianceError,
    DimensionError,
    Error,
    ParameterError,
    SingularMatrixError,
    StateError,
    am_bm,
    boundary,
    cm_dm,
    critical_value,
    fit_ols,
    kpss,
    monitor,
    power_study,
    simulate,
    size_study,
    table_critical_value,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DegenerateVarianceError",
    "DimensionError",
    "Error",
    "ParameterError",
    "SingularMatrixError",
    "StateError",
    "am_bm",
    "boundary",
    "cm_dm",
    "critical_value",
    "fit_ols",
    "kpss",
    "monitor",
    "power_study",
    "simulate",
    "size_study",
    "table_critical_value",
]
