from metricdeform.config_manager.config_manager import (
    THREADS_ENV,
    AnnulusConfig,
    BesovConfig,
    LedgerConfig,
    LoggingConfig,
    MetricDeformConfig,
    PerfectnessConfig,
    RuntimeConfig,
    TransformConfig,
    VerifyConfig,
)
from metricdeform.config_manager.path_resolver import PathResolver

__all__ = [
    # Main configuration class
    "MetricDeformConfig",
    # Sections
    "TransformConfig",
    "BesovConfig",
    "PerfectnessConfig",
    "AnnulusConfig",
    "LedgerConfig",
    "VerifyConfig",
    "RuntimeConfig",
    "LoggingConfig",
    # Utilities
    "PathResolver",
    "THREADS_ENV",
]
