"""Configuration, orchestration and command line for named experiments."""

from .config import (DEFAULT_PARAMS, EXPERIMENTS, ConfigError, Diagnostic,
                     ExperimentConfig, validate)
from .runner import OUT_ENV, RunManifest, map_ordered, rerun, run

__all__ = [
    "DEFAULT_PARAMS", "EXPERIMENTS", "ConfigError", "Diagnostic", "ExperimentConfig",
    "validate", "OUT_ENV", "RunManifest", "map_ordered", "rerun", "run",
]
