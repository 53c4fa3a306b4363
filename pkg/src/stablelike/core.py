"""Index functions and piecewise-constant sample paths.

An index function maps R^d into a compact subset of (0, 2) and controls the
local jump activity of a stable-like process. Sample paths produced by the
truncated simulator are exactly piecewise constant, so every path functional
below is evaluated from the finitely many stored states, without any time
discretisation.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = [
    "IndexFunction",
    "SamplePath",
    "constant",
    "clamped",
    "rational_bump",
    "table",
    "eval_index",
    "check_index_invariants",
    "path_value",
    "oscillation",
    "sup_index_along",
    "entry_range",
]

DEBUG = os.environ.get("STABLELIKE_DEBUG", "") not in ("", "0")

# numeric codes shared with the compiled kernels
KIND_CONSTANT = 0
KIND_BUMP = 1
KIND_TABLE = 2


@dataclass(frozen=True)
class IndexFunction:
    """A Lipschitz index function with declared range bounds.

    Build instances with :func:`constant`, :func:`rational_bump`,
    :func:`table` or :func:`clamped` rather than calling the constructor.
    """

    kind: str
    params: tuple = ()
    lipschitz_const: float = 0.0
    beta_min: float = 1.0
    beta_max: float = 1.0
    base: "IndexFunction | None" = None
    knots: tuple = ()
    values: tuple = ()

    def __post_init__(self):
        if not (0.0 < self.beta_min <= self.beta_max < 2.0):
            raise ValueError(
                f"index range [{self.beta_min}, {self.beta_max}] must lie inside (0, 2)"
            )
        if self.lipschitz_const < 0 or not math.isfinite(self.lipschitz_const):
            raise ValueError("lipschitz_const must be finite and >= 0")

    # -- evaluation -------------------------------------------------------
    def __call__(self, x) -> np.ndarray | float:
        return eval_index(self, x)

    def _raw(self, sq: np.ndarray, first: np.ndarray) -> np.ndarray:
        # sq: squared norms, first: first coordinates
        if self.kind == "constant":
            return np.full(sq.shape, self.params[0])
        if self.kind == "rational_bump":
            lo, amp, width = self.params
            return lo + amp / (1.0 + sq / (width * width))
        if self.kind == "table":
            return np.interp(first, np.asarray(self.knots), np.asarray(self.values))
        if self.kind == "clamped":
            return np.maximum(self.base._raw(sq, first), self.params[0])
        raise ValueError(f"unknown index kind {self.kind!r}")

    # -- compiled representation -----------------------------------------
    def program(self):
        """Flatten into ``(kind, params, knots, values, floor)`` for the kernels.

        Nested clamps collapse to a single floor, ``max(max(f, a), b) ==
        max(f, max(a, b))`` holds exactly in floating point.
        """
        floor = -np.inf
        f = self
        while f.kind == "clamped":
            floor = max(floor, f.params[0])
            f = f.base
        code = {"constant": KIND_CONSTANT, "rational_bump": KIND_BUMP,
                "table": KIND_TABLE}[f.kind]
        params = np.zeros(3)
        params[: len(f.params)] = f.params
        knots = np.asarray(f.knots if f.kind == "table" else (0.0, 1.0), dtype=float)
        values = np.asarray(f.values if f.kind == "table" else (0.0, 0.0), dtype=float)
        return code, params, knots, values, float(floor)

    # -- serialisation ------------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        if self.kind == "constant":
            return {"kind": "constant", "alpha": self.params[0]}
        if self.kind == "rational_bump":
            lo, amp, width = self.params
            return {"kind": "rational_bump", "low": lo, "amplitude": amp, "width": width}
        if self.kind == "table":
            return {"kind": "table", "knots": list(self.knots),
                    "values": list(self.values), "lipschitz": self.lipschitz_const}
        return {"kind": "clamped", "a": self.params[0], "base": self.base.to_dict()}

    @classmethod
    def from_dict(cls, desc: dict[str, Any]) -> "IndexFunction":
        kind = desc.get("kind")
        if kind == "constant":
            return constant(float(desc["alpha"]))
        if kind == "rational_bump":
            return rational_bump(float(desc.get("low", 0.6)),
                                 float(desc.get("amplitude", 0.8)),
                                 float(desc.get("width", 1.0)))
        if kind == "table":
            return table(desc["knots"], desc["values"], desc.get("lipschitz"))
        if kind == "clamped":
            return clamped(cls.from_dict(desc["base"]), float(desc["a"]))
        raise ValueError(f"unknown index descriptor {desc!r}")

    def describe(self) -> str:
        if self.kind == "constant":
            return f"Constant({self.params[0]:g})"
        if self.kind == "rational_bump":
            lo, amp, width = self.params
            return f"RationalBump({lo:g}+{amp:g}/(1+|x/{width:g}|^2))"
        if self.kind == "table":
            return f"Table({len(self.knots)} knots)"
        return f"Clamped({self.base.describe()}, {self.params[0]:g})"


def constant(alpha: float) -> IndexFunction:
    return IndexFunction("constant", (float(alpha),), 0.0, float(alpha), float(alpha))


def rational_bump(low: float = 0.6, amplitude: float = 0.8, width: float = 1.0) -> IndexFunction:
    """``beta(x) = low + amplitude / (1 + |x|^2 / width^2)``, range ``[low, low+amplitude]``.

    The supremum of ``|d/ds amplitude/(1+s^2)|`` is attained at ``s = 1/sqrt(3)``
    and equals ``amplitude * 3*sqrt(3)/8``.
    """
    if amplitude < 0 or width <= 0:
        raise ValueError("amplitude must be >= 0 and width > 0")
    lip = amplitude * 3.0 * math.sqrt(3.0) / 8.0 / width
    return IndexFunction("rational_bump", (float(low), float(amplitude), float(width)),
                         lip, float(low), float(low + amplitude))


def table(knots: Sequence[float], values: Sequence[float],
          lipschitz: float | None = None) -> IndexFunction:
    """Piecewise-linear index along the first coordinate, flat outside the knots.

    ``lipschitz`` may be declared by the caller; it is rejected when smaller
    than the steepest segment of the table.
    """
    k = np.asarray(knots, dtype=float)
    v = np.asarray(values, dtype=float)
    if k.ndim != 1 or k.shape != v.shape or k.size < 2:
        raise ValueError("knots and values must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(k) <= 0):
        raise ValueError("knots must be strictly increasing")
    steepest = float(np.max(np.abs(np.diff(v) / np.diff(k))))
    if lipschitz is None:
        lipschitz = steepest
    elif lipschitz < steepest * (1 - 1e-12):
        raise ValueError(f"declared Lipschitz constant {lipschitz} < table slope {steepest}")
    return IndexFunction("table", (), float(lipschitz), float(v.min()), float(v.max()),
                         knots=tuple(k.tolist()), values=tuple(v.tolist()))


def clamped(base: IndexFunction, a: float) -> IndexFunction:
    """``x -> max(base(x), a)``."""
    if not 0.0 < a < 2.0:
        raise ValueError("clamp level must lie in (0, 2)")
    return IndexFunction("clamped", (float(a),), base.lipschitz_const,
                         max(base.beta_min, a), max(base.beta_max, a), base=base)


def _as_points(x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


def eval_index(beta: IndexFunction, x) -> np.ndarray | float:
    """Evaluate ``beta`` at a point (returns float) or at rows of an (n, d) array."""
    arr = np.asarray(x, dtype=float)
    pts = _as_points(arr)
    if not np.all(np.isfinite(pts)):
        raise ValueError("index function evaluated at a non-finite point")
    out = beta._raw(np.einsum("ij,ij->i", pts, pts), pts[:, 0])
    if DEBUG and (out.min() < beta.beta_min or out.max() > beta.beta_max):
        raise AssertionError(f"{beta.describe()} left its declared range")
    if arr.ndim <= 1:
        return float(out[0])
    return out


def check_index_invariants(beta: IndexFunction, d: int, box: float = 10.0,
                           n: int = 10_000, seed: int = 0) -> dict[str, float]:
    """Probe range and Lipschitz bounds on a scrambled Sobol grid in ``[-box, box]^d``.

    Raises ``AssertionError`` on a violation; returns the observed extremes.
    """
    from scipy.stats import qmc

    m = int(math.ceil(math.log2(max(n, 2))))
    pts = qmc.Sobol(d, seed=seed).random_base2(m)[:n] * 2 * box - box
    vals = eval_index(beta, pts)
    lo, hi = float(vals.min()), float(vals.max())
    if lo < beta.beta_min - 1e-15 or hi > beta.beta_max + 1e-15:
        raise AssertionError(f"range [{lo}, {hi}] escapes [{beta.beta_min}, {beta.beta_max}]")
    # pairs of neighbours plus small perturbations probe the local slope
    rng = np.random.default_rng(seed)
    shifted = pts + rng.normal(scale=box * 1e-3, size=pts.shape)
    dist = np.linalg.norm(pts - shifted, axis=1)
    ratio = np.abs(vals - eval_index(beta, shifted)) / dist
    far = np.roll(pts, 1, axis=0)
    ratio_far = np.abs(vals - np.roll(vals, 1)) / np.linalg.norm(pts - far, axis=1)
    worst = float(max(ratio.max(), ratio_far.max()))
    if worst > beta.lipschitz_const * (1 + 1e-9) + 1e-12:
        raise AssertionError(f"observed slope {worst} exceeds Lipschitz constant "
                             f"{beta.lipschitz_const}")
    return {"min": lo, "max": hi, "max_slope": worst}


@dataclass(frozen=True)
class SamplePath:
    """A càdlàg piecewise-constant path on ``[0, horizon]``.

    ``states[k]`` is the value on ``[times[k], times[k+1])``. A path whose
    state blew past the explosion guard is returned truncated at that point
    with ``censored=True``.
    """

    times: np.ndarray
    states: np.ndarray
    jump_flags: np.ndarray
    horizon: float
    censored: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        s = np.asarray(self.states, dtype=float)
        if s.ndim == 1:
            s = s.reshape(-1, 1)
        f = np.asarray(self.jump_flags, dtype=bool)
        if t.ndim != 1 or t.size == 0 or s.shape[0] != t.size or f.shape != t.shape:
            raise ValueError("times, states and jump_flags must have matching lengths")
        if t[0] != 0.0:
            raise ValueError("paths start at time 0")
        if np.any(np.diff(t) <= 0):
            raise ValueError("path times must be strictly increasing")
        if t[-1] > self.horizon:
            raise ValueError("path times exceed the horizon")
        for name, arr in (("times", t), ("states", s), ("jump_flags", f)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def d(self) -> int:
        return self.states.shape[1]

    def __len__(self) -> int:
        return self.times.size

    @classmethod
    def constant(cls, x0, horizon: float) -> "SamplePath":
        x = np.atleast_1d(np.asarray(x0, dtype=float)).reshape(1, -1)
        return cls(np.zeros(1), x, np.zeros(1, dtype=bool), float(horizon))

    def jumps(self) -> np.ndarray:
        """Jump vectors ``states[k] - states[k-1]`` at flagged entries, shape (m, d)."""
        idx = np.flatnonzero(self.jump_flags)
        return self.states[idx] - self.states[idx - 1]


def _index_at(path: SamplePath, t) -> np.ndarray | int:
    return np.searchsorted(path.times, t, side="right") - 1


def path_value(path: SamplePath, t: float) -> np.ndarray:
    """Right-continuous lookup of the state at time ``t``."""
    if not (0.0 <= t <= path.horizon):
        raise ValueError(f"t={t} outside [0, {path.horizon}]")
    return path.states[int(_index_at(path, t))].copy()


def entry_range(path: SamplePath, s: float, t: float) -> tuple[int, int]:
    """Inclusive index range of the states taken on ``[s, t]``."""
    if not (0.0 <= s <= t <= path.horizon) or s == t:
        raise ValueError(f"invalid interval [{s}, {t}] for horizon {path.horizon}")
    return int(_index_at(path, s)), int(_index_at(path, t))


def _diameter(pts: np.ndarray) -> float:
    if pts.shape[0] < 2:
        return 0.0
    if pts.shape[1] == 1:
        return float(np.ptp(pts[:, 0]))
    if pts.shape[0] > 2000:
        from scipy.spatial import ConvexHull, QhullError

        try:
            pts = pts[ConvexHull(pts).vertices]
        except QhullError:  # degenerate (collinear) point cloud
            pass
    from scipy.spatial.distance import pdist

    return float(pdist(pts).max())


def oscillation(path: SamplePath, interval: tuple[float, float]) -> float:
    """``sup |path(u) - path(v)|`` over ``u, v`` in the closed interval."""
    i, j = entry_range(path, *interval)
    return _diameter(path.states[i: j + 1])


def sup_index_along(path: SamplePath, beta: IndexFunction,
                    interval: tuple[float, float] | None = None) -> float:
    """Largest index value visited on the interval (whole path by default)."""
    if interval is None:
        pts = path.states
    else:
        i, j = entry_range(path, *interval)
        pts = path.states[i: j + 1]
    return float(np.max(eval_index(beta, pts)))
