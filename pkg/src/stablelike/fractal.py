"""Dimension, variation and sojourn estimators for piecewise-constant paths.

All estimators read the stored states of a :class:`~stablelike.core.SamplePath`
and are exact for the path they are given: dyadic oscillations, partition sums
and occupation times are computed from the finitely many jump instants, never
from a resampled grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import stats
from scipy.integrate import trapezoid

from .core import IndexFunction, SamplePath, entry_range, sup_index_along

__all__ = [
    "DimensionEstimate",
    "PVariationProfile",
    "SojournStats",
    "fit_loglog",
    "dyadic_entry_index",
    "dyadic_oscillations",
    "range_scales",
    "default_finest_scale",
    "box_count_range",
    "graph_grid_counts",
    "box_count_graph",
    "default_graph_depth",
    "p_variation",
    "variation_index",
    "sojourn",
    "silverman_bandwidth",
    "kde_sup",
    "heat_kernel_bound_check",
    "predicted_dimension",
    "prediction_report",
    "dimension_vs_prediction",
]

R2_FLAG = 0.98


@dataclass
class DimensionEstimate:
    scales: np.ndarray
    counts: np.ndarray
    slope: float
    fit_r2: float
    scale_window: tuple[float, float]
    intercept: float = 0.0
    flags: list[str] = field(default_factory=list)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    def rows(self) -> list[dict]:
        lo, hi = self.scale_window
        return [{"scale": float(s), "count": int(c), "log_inv_scale": -math.log(s),
                 "log_count": math.log(c), "in_window": bool(lo <= s <= hi)}
                for s, c in zip(self.scales, self.counts)]

    def summary(self) -> dict:
        return {"slope": self.slope, "fit_r2": self.fit_r2,
                "window_min": self.scale_window[0], "window_max": self.scale_window[1],
                "n_scales": int(len(self.scales)), "flags": ";".join(self.flags)}


def fit_loglog(scales: np.ndarray, counts: np.ndarray, drop_coarse: int = 2,
               drop_fine: int = 2) -> DimensionEstimate:
    """Least-squares slope of ``log N`` against ``log 1/scale`` inside the window.

    ``scales`` must be strictly decreasing. The coarsest ``drop_coarse`` and
    finest ``drop_fine`` scales are left out of the fit (kept in the record).
    """
    scales = np.asarray(scales, dtype=float)
    counts = np.asarray(counts)
    if scales.ndim != 1 or scales.size != counts.size:
        raise ValueError("scales and counts must be 1-d and of equal length")
    if np.any(np.diff(scales) >= 0):
        raise ValueError("scales must be strictly decreasing")
    flags = []
    n = scales.size
    lo, hi = drop_coarse, n - drop_fine
    if hi - lo < 2:
        lo, hi = 0, n
        flags.append("window-too-short")
    xs = -np.log(scales[lo:hi])
    ys = np.log(counts[lo:hi])
    if np.all(counts == counts[0]):
        return DimensionEstimate(scales, counts, 0.0, 1.0,
                                 (float(scales[hi - 1]), float(scales[lo])),
                                 float(ys[0]), flags + ["degenerate"])
    res = stats.linregress(xs, ys)
    r2 = float(res.rvalue ** 2)
    if r2 < R2_FLAG:
        flags.append("low-r2")
    return DimensionEstimate(scales, counts, float(res.slope), r2,
                             (float(scales[hi - 1]), float(scales[lo])),
                             float(res.intercept), flags)


# ---------------------------------------------------------------------------
# dyadic bookkeeping

def dyadic_entry_index(path: SamplePath, j: int) -> np.ndarray:
    """Index of the state active at each dyadic time ``k T 2^-j``, ``k = 0..2^j``."""
    grid = np.arange(2 ** j + 1) * (path.horizon / 2 ** j)
    grid[-1] = path.horizon
    return np.searchsorted(path.times, grid, side="right") - 1


def dyadic_oscillations(path: SamplePath, j: int) -> np.ndarray:
    """``Osc(path, I_{j,k})`` for the ``2^j`` closed dyadic intervals (d = 1)."""
    if path.d != 1:
        raise ValueError("vectorised dyadic oscillations are one-dimensional")
    x = path.states[:, 0]
    idx = dyadic_entry_index(path, j)
    starts, ends = idx[:-1], idx[1:]
    # interval k covers entries starts[k] .. ends[k] inclusive and ends[k] == starts[k+1]
    hi = np.maximum(np.maximum.reduceat(x, starts), x[ends])
    lo = np.minimum(np.minimum.reduceat(x, starts), x[ends])
    return hi - lo


# ---------------------------------------------------------------------------
# range

def range_scales(path: SamplePath, finest: float, coarsest: float | None = None,
                 ratio: float = 2.0) -> np.ndarray:
    """Geometric scales from ``coarsest`` (default: path extent) down to ``finest``."""
    extent = float(np.max(np.ptp(path.states, axis=0))) if len(path) > 1 else 0.0
    if coarsest is None:
        coarsest = extent if extent > 0 else 1.0
    if finest >= coarsest:
        return np.array([coarsest])
    n = int(math.floor(math.log(coarsest / finest) / math.log(ratio))) + 1
    return coarsest / ratio ** np.arange(n)


def default_finest_scale(path: SamplePath, epsilon: float, beta_max: float) -> float:
    """Finest usable scale: above the truncation displacement ``eps^(1/beta_max)`` (x2)
    and above the event resolution ``1/len(path)``."""
    return max(2.0 * epsilon ** (1.0 / beta_max), 1.0 / max(len(path), 1))


def _count_cells(states: np.ndarray, delta: float, offset: np.ndarray) -> int:
    cells = np.floor(states / delta + offset).astype(np.int64)
    return _count_rows(cells)


def _count_rows(cells: np.ndarray) -> int:
    """Number of distinct integer rows."""
    if cells.shape[1] == 1:
        return int(np.unique(cells[:, 0]).size)
    cells = cells - cells.min(axis=0)
    span = cells.max(axis=0) + 1
    if np.prod(span.astype(float)) < 2.0 ** 62:
        key = np.zeros(cells.shape[0], dtype=np.int64)
        for c in range(cells.shape[1]):
            key = key * span[c] + cells[:, c]
        return int(np.unique(key).size)
    return int(np.unique(cells, axis=0).shape[0])


def box_count_range(path: SamplePath, scales: Sequence[float],
                    offset: Sequence[float] | None = None,
                    drop_coarse: int = 2, drop_fine: int = 2) -> DimensionEstimate:
    """Grid box counting of the set of visited states.

    ``offset`` shifts the grid by a fraction of a cell per axis.
    """
    scales = np.asarray(scales, dtype=float)
    off = np.zeros(path.d) if offset is None else np.asarray(offset, dtype=float)
    states = path.states
    counts = np.array([_count_cells(states, s, off) for s in scales])
    if np.all(np.ptp(states, axis=0) == 0):
        return DimensionEstimate(scales, counts, 0.0, 1.0,
                                 (float(scales.min()), float(scales.max())), 0.0,
                                 ["degenerate"])
    return fit_loglog(scales, counts, drop_coarse, drop_fine)


# ---------------------------------------------------------------------------
# graph

def default_graph_depth(path: SamplePath, per_box: float = 8.0) -> int:
    """Deepest dyadic level with at least ``per_box`` events per time box on average."""
    n = max(int(path.jump_flags.sum()), 1)
    return int(min(24, max(4, math.floor(math.log2(n / per_box)))))


def graph_grid_counts(path: SamplePath, j: int) -> int:
    """Occupied cells of side ``2^-j`` in (rescaled time) x space."""
    idx = dyadic_entry_index(path, j)
    starts, ends = idx[:-1], idx[1:]
    lengths = ends - starts + 1
    box = np.repeat(np.arange(starts.size), lengths)
    # entries starts[k]..ends[k] for each k, concatenated
    offs = np.arange(lengths.sum()) - np.repeat(np.cumsum(lengths) - lengths, lengths)
    entries = np.repeat(starts, lengths) + offs
    cells = np.floor(path.states[entries] * 2.0 ** j).astype(np.int64)
    return _count_rows(np.column_stack([box, cells]))


def box_count_graph(path: SamplePath, max_depth: int | None = None, min_depth: int = 0,
                    method: str = "auto", drop_coarse: int = 2,
                    drop_fine: int = 2) -> DimensionEstimate:
    """Dyadic box counts of the graph ``{(t/T, X_t)}``.

    ``method="oscillation"`` uses the covering count
    ``N_j = sum_k (ceil(2^j Osc(I_{j,k})) + 2)``; ``method="grid"`` counts the
    occupied space-time cells. ``"auto"`` picks the oscillation covering in
    d = 1 and the grid count otherwise, because in d >= 2 an interval's
    oscillation box over-covers the sparse range of the path.
    """
    if method == "auto":
        method = "oscillation" if path.d == 1 else "grid"
    if max_depth is None:
        # a sparse grid count keeps bending down at fine levels, so stop earlier
        max_depth = default_graph_depth(path, 8.0 if method == "oscillation" else 256.0)
    if not 0 <= min_depth < max_depth <= 24:
        raise ValueError("need 0 <= min_depth < max_depth <= 24")
    levels = np.arange(min_depth, max_depth + 1)
    counts = []
    for j in levels:
        if method == "oscillation":
            osc = (dyadic_oscillations(path, int(j)) if path.d == 1
                   else _dyadic_osc_nd(path, int(j)))
            counts.append(int(np.sum(np.ceil(osc * 2.0 ** j) + 2)))
        elif method == "grid":
            counts.append(graph_grid_counts(path, int(j)))
        else:
            raise ValueError(f"unknown method {method!r}")
    scales = 2.0 ** -levels.astype(float)
    est = fit_loglog(scales, np.array(counts), drop_coarse, drop_fine)
    return est


def _dyadic_osc_nd(path: SamplePath, j: int) -> np.ndarray:
    from .core import _diameter

    idx = dyadic_entry_index(path, j)
    return np.array([_diameter(path.states[a: b + 1]) for a, b in zip(idx[:-1], idx[1:])])


# ---------------------------------------------------------------------------
# p-variation

@dataclass
class PVariationProfile:
    p_grid: np.ndarray
    depths: np.ndarray
    v_values: np.ndarray   # shape (len(p_grid), len(depths))
    s_values: np.ndarray   # shape (len(p_grid),)
    p_hat: float | None = None

    def stabilizes(self, p_index: int, last: int = 3) -> bool:
        v = self.v_values[p_index, -last:]
        return bool(np.all(np.diff(v) <= 0))

    def grows(self, p_index: int, last: int = 3) -> bool:
        v = self.v_values[p_index, -last:]
        return bool(np.all(np.diff(v) > 0))

    def rows(self) -> list[dict]:
        out = []
        for i, p in enumerate(self.p_grid):
            for k, j in enumerate(self.depths):
                out.append({"p": float(p), "depth": int(j), "V_p": float(self.v_values[i, k]),
                            "S_p": float(self.s_values[i])})
        return out


def p_variation(path: SamplePath, p_grid: Iterable[float], depths: Iterable[int],
                last: int = 3) -> PVariationProfile:
    """Partition sums over dyadic grids and jump sums ``S_p`` for each exponent.

    ``V_p`` at depth j sums ``|X(t_{i+1}) - X(t_i)|^p`` over the ``2^j + 1``
    dyadic points of ``[0, T]``. The variation index ``p_hat`` is the smallest
    grid exponent whose ``V_p`` does not increase over the last ``last`` depths.
    """
    p_grid = np.asarray(list(p_grid), dtype=float)
    depths = np.asarray(list(depths), dtype=int)
    if depths.size and depths.max() > 24:
        raise ValueError("depths are limited to 24")
    v = np.empty((p_grid.size, depths.size))
    for k, j in enumerate(depths):
        inc = np.linalg.norm(np.diff(path.states[dyadic_entry_index(path, int(j))], axis=0),
                             axis=1)
        inc = inc[inc > 0]
        for i, p in enumerate(p_grid):
            v[i, k] = np.sum(inc ** p)
    jumps = np.linalg.norm(path.jumps(), axis=1)
    jumps = jumps[jumps > 0]
    s = np.array([np.sum(jumps ** p) for p in p_grid])
    prof = PVariationProfile(p_grid, depths, v, s)
    prof.p_hat = variation_index(prof, last)
    return prof


def variation_index(profile: PVariationProfile, last: int = 3) -> float | None:
    order = np.argsort(profile.p_grid)
    for i in order:
        if profile.stabilizes(int(i), last):
            return float(profile.p_grid[i])
    return None


# ---------------------------------------------------------------------------
# sojourn

@dataclass
class SojournStats:
    t0: float
    a: float
    s: float
    value: float


def sojourn(path: SamplePath, t0: float, a: float, s: float,
            center: np.ndarray | None = None) -> SojournStats:
    """Time spent within distance ``a`` of ``X_{t0}`` during ``[t0, t0+s]``.

    ``center`` overrides ``X_{t0}`` (used to split a window while keeping the
    original centre).
    """
    if s <= 0 or a < 0 or t0 < 0 or t0 + s > path.horizon * (1 + 1e-15):
        raise ValueError(f"window [{t0}, {t0 + s}] outside [0, {path.horizon}]")
    end = min(t0 + s, path.horizon)
    i, j = entry_range(path, t0, end)
    c = path.states[i] if center is None else np.asarray(center, dtype=float)
    seg = path.states[i: j + 1]
    inside = np.linalg.norm(seg - c, axis=1) <= a
    if inside.all():
        return SojournStats(t0, a, s, float(end - t0) if end < t0 + s else s)
    edges = np.concatenate(([t0], path.times[i + 1: j + 1], [end]))
    value = float(np.sum(np.diff(edges)[inside]))
    return SojournStats(t0, a, s, min(value, s))


# ---------------------------------------------------------------------------
# transition density

def silverman_bandwidth(x: np.ndarray, central: float = 0.98) -> float:
    """Silverman's rule on the central fraction of the sample."""
    x = np.asarray(x, dtype=float)
    q = (1 - central) / 2
    lo, hi = np.quantile(x, [q, 1 - q])
    core = x[(x >= lo) & (x <= hi)]
    sd = np.std(core, ddof=1)
    iqr = np.subtract(*np.quantile(core, [0.75, 0.25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * spread * core.size ** -0.2


def kde_sup(x: np.ndarray, bandwidth: float | None = None, grid_size: int = 1024,
            span: float = 6.0) -> tuple[float, float, float]:
    """Gaussian KDE of a 1-d sample on a grid around its bulk.

    Returns ``(sup_density, argmax, mass_on_grid)``. The grid covers the
    central 98% of the sample widened by ``span`` bandwidths; the mass is the
    trapezoid integral of the estimate over that grid divided by the fraction
    of the sample it covers.
    """
    x = np.asarray(x, dtype=float)
    h = silverman_bandwidth(x) if bandwidth is None else bandwidth
    lo, hi = np.quantile(x, [0.01, 0.99])
    grid = np.linspace(lo - span * h, hi + span * h, grid_size)
    # binned estimate: exact for the sample up to the grid spacing
    dx = grid[1] - grid[0]
    inside = x[(x >= grid[0] - 0.5 * dx) & (x <= grid[-1] + 0.5 * dx)]
    counts = np.bincount(np.clip(np.rint((inside - grid[0]) / dx).astype(int), 0,
                                 grid_size - 1), minlength=grid_size)
    kern_x = np.arange(-grid_size + 1, grid_size) * dx
    kern = np.exp(-0.5 * (kern_x / h) ** 2) / (h * math.sqrt(2 * math.pi))
    dens = np.convolve(counts, kern)[grid_size - 1: 2 * grid_size - 1] / x.size
    frac = inside.size / x.size
    mass = float(trapezoid(dens, grid)) / frac if frac > 0 else 0.0
    k = int(np.argmax(dens))
    return float(dens[k]), float(grid[k]), mass


def heat_kernel_bound_check(endpoints: dict[float, np.ndarray], alpha: float, d: int = 1,
                            slack: float = 0.15) -> dict:
    """Log-log slope of the peak transition density against time.

    ``endpoints`` maps each time ``t`` to the sampled positions ``X_t``; at
    least 10^4 samples per time are required. Passes when the fitted slope
    is at least ``-d/alpha - slack``.
    """
    if d != 1:
        raise ValueError("the density check is one-dimensional")
    ts = np.array(sorted(endpoints))
    if ts.size < 2:
        raise ValueError("need at least two times")
    rows = []
    for t in ts:
        x = np.asarray(endpoints[t], dtype=float).ravel()
        if x.size < 10_000:
            raise ValueError(f"{x.size} samples at t={t}: at least 10^4 required")
        sup, arg, mass = kde_sup(x)
        rows.append({"t": float(t), "sup_density": sup, "argmax": arg, "kde_mass": mass,
                     "n": int(x.size)})
    sl = stats.linregress(np.log(ts), np.log([r["sup_density"] for r in rows]))
    bound = -d / alpha - slack
    return {"rows": rows, "slope": float(sl.slope), "bound": bound,
            "passed": bool(sl.slope >= bound)}


# ---------------------------------------------------------------------------
# theory vs estimate

def predicted_dimension(path: SamplePath, beta: IndexFunction, kind: str = "range") -> float:
    """Per-path prediction from the sup of the index along the stored states.

    Range: ``d ^ sup beta(X_t)``. Graph: ``1 v sup beta`` for d >= 2 and
    ``1 v (2 - 1/sup beta)`` for d = 1.
    """
    b = sup_index_along(path, beta)
    if kind == "range":
        return min(float(path.d), b)
    if kind == "graph":
        return max(1.0, b) if path.d >= 2 else max(1.0, 2.0 - 1.0 / b)
    raise ValueError("kind must be 'range' or 'graph'")


def prediction_report(predictions: Sequence[float], estimates: Sequence[float]) -> dict:
    """Mean absolute error and Spearman rank correlation (nan when either side is constant)."""
    preds = np.asarray(predictions, dtype=float)
    est = np.asarray(estimates, dtype=float)
    if np.ptp(preds) > 0 and np.ptp(est) > 0:
        rho = float(stats.spearmanr(preds, est).statistic)
    else:
        rho = float("nan")
    return {"predictions": preds, "estimates": est,
            "mean_abs_error": float(np.mean(np.abs(preds - est))),
            "rank_correlation": rho, "mean_estimate": float(np.mean(est)),
            "mean_prediction": float(np.mean(preds))}


def dimension_vs_prediction(paths: Sequence[SamplePath], beta: IndexFunction,
                            estimates: Sequence[float], kind: str = "range") -> dict:
    """Compare estimated slopes with the per-path predicted dimension."""
    preds = [predicted_dimension(p, beta, kind) for p in paths]
    return prediction_report(preds, estimates)
