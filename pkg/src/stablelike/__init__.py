"""Exact-up-to-truncation simulation of stable-like jump processes, with
fractal-dimension estimators and symbol numerics."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"

from .core import (IndexFunction, SamplePath, check_index_invariants, clamped, constant,
                   entry_range, eval_index, oscillation, path_value, rational_bump,
                   sup_index_along, table)
from .jumps import JumpEvent, JumpStream, derive_seeds, make_rng, sample_stream
from .sde import (CouplingReport, SimulationConfig, auto_epsilon, simulate, simulate_coupled,
                  slice_jump_sums, slice_moment_bound, truncation_bound)

__all__ = [
    "__version__",
    "IndexFunction", "SamplePath", "check_index_invariants", "clamped", "constant",
    "entry_range", "eval_index", "oscillation", "path_value", "rational_bump",
    "sup_index_along", "table",
    "JumpEvent", "JumpStream", "derive_seeds", "make_rng", "sample_stream",
    "CouplingReport", "SimulationConfig", "auto_epsilon", "simulate", "simulate_coupled",
    "slice_jump_sums", "slice_moment_bound", "truncation_bound",
]
