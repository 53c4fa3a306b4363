"""Experiment configuration: parsing, defaults and validation."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from ..core import IndexFunction
from ..sde import DEFAULT_MAX_EVENTS, auto_epsilon
from ..symbol import GUARD_BAND

__all__ = [
    "EXPERIMENTS",
    "DEFAULT_PARAMS",
    "ConfigError",
    "Diagnostic",
    "ExperimentConfig",
    "validate",
]

EXPERIMENTS = ("simulate", "dim-range", "dim-graph", "pvar", "sojourn", "couple",
               "symbol-check", "generator-check", "heat-kernel")

# "auto" entries are resolved from the path or the cutoff at run time
DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "simulate": {"write_paths": True, "binary": False},
    "dim-range": {"coarsest": 0.25, "finest": "auto", "ratio": 2.0,
                  "drop_coarse": 2, "drop_fine": 2, "band": None},
    "dim-graph": {"method": "auto", "max_depth": "auto", "min_depth": 0,
                  "drop_coarse": 2, "drop_fine": 2, "band": None},
    "pvar": {"p_grid": [0.96, 1.2, 1.44], "depths": "auto", "last": 3},
    "sojourn": {"t0": 0.0, "a": 2.0 ** -8, "s": 2.0 ** -8, "lambdas": [12, 24, 48],
                "slack": 1.5},
    "couple": {"a": 1.0, "index_drop": 0.05, "replay": None},
    "symbol-check": {"alphas": [0.3, 0.5, 0.9, 1.1, 1.5, 1.9],
                     "x_grid": [-2.0, -1.0, 0.0, 1.0, 2.0],
                     "xi_grid": [-3.0, 0.5, 1.0, 2.0, 10.0],
                     "wave_xi": [0.5, 1.3, 4.0], "wave_dims": [1, 2],
                     "tol_c_alpha": 1e-6, "tol_fourier": 1e-4, "tol_generator": 1e-3},
    "generator-check": {"bump_width": 1.0, "max_z": 5.0},
    "heat-kernel": {"t_grid": [0.01, 0.04, 0.16], "slack": 0.15},
}

FIELDS = ("experiment", "beta", "d", "x0", "horizon", "epsilon", "n_paths", "seed",
          "params", "out_dir", "max_events")


class ConfigError(ValueError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(f"{d.field}: {d.message}" for d in self.diagnostics))


@dataclass(frozen=True)
class Diagnostic:
    level: str   # "error" or "warning"
    field: str
    message: str

    def __str__(self):
        return f"{self.level}: {self.field}: {self.message}"


@dataclass
class ExperimentConfig:
    """One run: which experiment, which process, how many paths, where to write."""

    experiment: str
    beta: dict = field(default_factory=lambda: {"kind": "constant", "alpha": 1.5})
    d: int = 1
    x0: list | None = None
    horizon: float = 1.0
    epsilon: float | str = "auto"
    n_paths: int = 1
    seed: int = 0
    params: dict = field(default_factory=dict)
    out_dir: str | None = None
    max_events: float = DEFAULT_MAX_EVENTS

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        unknown = sorted(set(doc) - set(FIELDS))
        if unknown:
            raise ConfigError([Diagnostic("error", k, "unknown field") for k in unknown])
        if "experiment" not in doc:
            raise ConfigError([Diagnostic("error", "experiment", "missing")])
        return cls(**copy.deepcopy(doc))

    @classmethod
    def load(cls, file) -> "ExperimentConfig":
        doc = json.loads(Path(file).read_text(encoding="utf-8"))
        if "config" in doc and "digests" in doc:   # a manifest
            doc = doc["config"]
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        return asdict(self)

    def index(self) -> IndexFunction:
        return IndexFunction.from_dict(self.beta)

    def resolved(self) -> "ExperimentConfig":
        """Copy with ``x0``, ``epsilon`` and every estimator parameter materialized."""
        errors = [d for d in validate(self) if d.level == "error"]
        if errors:
            raise ConfigError(errors)
        out = copy.deepcopy(self)
        beta = out.index()
        out.beta = beta.to_dict()
        out.d = int(out.d)
        out.x0 = [0.0] * out.d if out.x0 is None else [float(v) for v in out.x0]
        out.horizon = float(out.horizon)
        if out.epsilon == "auto":
            out.epsilon = auto_epsilon(beta.beta_max, out.horizon, max_events=out.max_events)
        out.epsilon = float(out.epsilon)
        params = dict(DEFAULT_PARAMS[out.experiment])
        params.update(out.params)
        out.params = params
        out.n_paths = int(out.n_paths)
        out.seed = int(out.seed)
        return out


def _num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def validate(config: ExperimentConfig) -> list[Diagnostic]:
    """Every problem found in ``config``; errors block a run, warnings do not."""
    out: list[Diagnostic] = []

    def err(f, m):
        out.append(Diagnostic("error", f, m))

    def warn(f, m):
        out.append(Diagnostic("warning", f, m))

    if config.experiment not in EXPERIMENTS:
        err("experiment", f"must be one of {', '.join(EXPERIMENTS)}")
    beta = None
    try:
        beta = IndexFunction.from_dict(config.beta)
    except (ValueError, KeyError, TypeError) as exc:
        err("beta", f"invalid index descriptor: {exc}")
    if not isinstance(config.d, int) or isinstance(config.d, bool) or config.d < 1:
        err("d", "must be an integer >= 1")
    if config.x0 is not None:
        try:
            x0 = [float(v) for v in config.x0]
        except (TypeError, ValueError):
            err("x0", "must be a list of numbers")
        else:
            if isinstance(config.d, int) and len(x0) != config.d:
                err("x0", f"has {len(x0)} coordinates, expected d={config.d}")
            if not all(math.isfinite(v) for v in x0):
                err("x0", "must be finite")
    if not _num(config.horizon) or config.horizon <= 0:
        err("horizon", "must be a positive number")
    if config.epsilon != "auto" and (not _num(config.epsilon) or not 0 < config.epsilon < 1):
        err("epsilon", "must be 'auto' or a number in (0, 1)")
    if not isinstance(config.n_paths, int) or isinstance(config.n_paths, bool) \
            or config.n_paths < 1:
        err("n_paths", "must be an integer >= 1")
    if not isinstance(config.seed, int) or isinstance(config.seed, bool) or config.seed < 0:
        err("seed", "must be a non-negative integer")
    if not _num(config.max_events) or config.max_events < 1:
        err("max_events", "must be a number >= 1")
    if not isinstance(config.params, dict):
        err("params", "must be a key/value mapping")
    elif config.experiment in DEFAULT_PARAMS:
        known = DEFAULT_PARAMS[config.experiment]
        for k in sorted(set(config.params) - set(known)):
            err(f"params.{k}", f"not a parameter of {config.experiment}")
    if out and any(d.level == "error" for d in out):
        return out

    params = dict(DEFAULT_PARAMS[config.experiment])
    params.update(config.params)
    lo, hi = GUARD_BAND
    if beta.beta_max > hi or beta.beta_min < lo:
        warn("beta", f"index range [{beta.beta_min:g}, {beta.beta_max:g}] reaches outside "
             f"[{lo}, {hi}]: near the guard band the C_alpha quadrature is unstable")
    eps = (auto_epsilon(beta.beta_max, config.horizon, max_events=config.max_events)
           if config.epsilon == "auto" else float(config.epsilon))
    events = config.horizon / eps * config.n_paths
    if events > 1e10:
        warn("epsilon", f"about {events:.1e} events in total: infeasible at desk scale")
    elif config.horizon / eps > 5e7:
        warn("epsilon", f"about {config.horizon / eps:.1e} events per path: memory heavy")
    if config.experiment == "dim-range":
        displacement = 2.0 * eps ** (1.0 / beta.beta_max)
        resolution = eps / config.horizon
        fin = params["finest"]
        if fin != "auto" and (not _num(fin) or fin <= 0):
            err("params.finest", "must be 'auto' or a positive number")
        elif fin != "auto" and fin < max(displacement, resolution):
            warn("params.finest", f"{fin:g} is below the event resolution / truncation "
                 f"scale {max(displacement, resolution):.3g}: slope biased toward 0")
        if not _num(params["coarsest"]) or params["coarsest"] <= 0:
            err("params.coarsest", "must be a positive number")
        if not _num(params["ratio"]) or params["ratio"] <= 1:
            err("params.ratio", "must be > 1")
    if config.experiment == "dim-graph":
        md = params["max_depth"]
        if md != "auto" and (not isinstance(md, int) or not 1 <= md <= 24):
            err("params.max_depth", "must be 'auto' or an integer in [1, 24]")
        elif md != "auto" and 2.0 ** md > config.horizon / eps:
            warn("params.max_depth", "finer than the event resolution: slope biased toward 1")
        if params["method"] not in ("auto", "oscillation", "grid"):
            err("params.method", "must be auto, oscillation or grid")
    if config.experiment == "pvar":
        deps = params["depths"]
        if deps != "auto" and (not isinstance(deps, list) or not deps
                               or any(not isinstance(j, int) or not 0 <= j <= 24 for j in deps)):
            err("params.depths", "must be 'auto' or a list of integers in [0, 24]")
        if not params["p_grid"] or any(not _num(p) or p <= 0 for p in params["p_grid"]):
            err("params.p_grid", "must be a list of positive numbers")
    if config.experiment == "sojourn":
        t0, s, a = params["t0"], params["s"], params["a"]
        if not all(_num(v) for v in (t0, s, a)) or s <= 0 or a < 0 or t0 < 0:
            err("params", "sojourn needs t0 >= 0, s > 0, a >= 0")
        elif t0 + s > config.horizon:
            err("params.s", f"window [t0, t0+s] ends after the horizon {config.horizon}")
        if beta.beta_min <= 1:
            warn("beta", "the sojourn tail constant 2/(1 - 1/beta_min) needs beta_min > 1; "
                 "no bound is reported")
    if config.experiment == "couple":
        a = params["a"]
        if not _num(a) or not 0 < a < 2:
            err("params.a", "clamp level must lie in (0, 2)")
        if params["replay"] is not None and config.n_paths != 1:
            err("n_paths", "a replayed stream drives exactly one path")
    if config.experiment == "heat-kernel":
        ts = params["t_grid"]
        if not ts or any(not _num(t) or not 0 < t < 1 for t in ts) or len(ts) < 2:
            err("params.t_grid", "needs at least two times in (0, 1)")
        elif max(ts) > config.horizon:
            err("params.t_grid", "times must not exceed the horizon")
        if config.d != 1:
            err("d", "the density check is one-dimensional")
        if config.n_paths < 10_000:
            err("n_paths", "the density estimate needs at least 10^4 paths")
    if config.experiment == "generator-check":
        if config.d > 3:
            err("d", "the generator quadrature supports d <= 3")
        if config.horizon > 0.1:
            warn("horizon", "the finite-difference time step is large")
    if config.experiment == "symbol-check":
        if any(not lo <= a <= hi for a in params["alphas"]):
            err("params.alphas", f"indices must lie in [{lo}, {hi}]")
        if any(d not in (1, 2, 3) for d in params["wave_dims"]):
            err("params.wave_dims", "dimensions must be 1, 2 or 3")
    return out
