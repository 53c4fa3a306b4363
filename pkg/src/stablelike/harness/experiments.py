"""Per-path work and reductions for each named experiment.

A per-path function receives the resolved config, the path's position in the
batch and its stream seed, and returns a plain dict (it runs in worker
processes). A reducer receives the per-path results in seed order and returns
``(tables, summary)``; tables are lists of row dicts written as CSV.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .. import io
from ..core import IndexFunction, path_value
from ..fractal import (box_count_graph, box_count_range, default_finest_scale,
                       heat_kernel_bound_check, p_variation, predicted_dimension,
                       prediction_report, range_scales, sojourn)
from ..sde import SimulationConfig, simulate, simulate_coupled
from ..symbol import (apply_generator, c_alpha, c_alpha_closed_form, symbol,
                      symbol_fourier_check)
from .config import ExperimentConfig

__all__ = ["PER_PATH", "REDUCERS", "sim_config", "bump", "bump_grad", "auto_depths"]


def sim_config(cfg: ExperimentConfig, seed: int, beta: IndexFunction | None = None,
               **kw) -> SimulationConfig:
    return SimulationConfig(beta or cfg.index(), tuple(cfg.x0), cfg.horizon, cfg.epsilon,
                            cfg.d, seed, **kw)


def auto_depths(horizon: float, epsilon: float) -> list[int]:
    """Six dyadic depths ending three levels below the mean event spacing."""
    top = min(20, int(math.floor(math.log2(horizon / epsilon))) + 3)
    return list(range(max(top - 5, 0), top + 1))


def bump(y, width: float = 1.0) -> float:
    y = np.asarray(y, dtype=float)
    return float(np.exp(-0.5 * np.dot(y, y) / width ** 2))


def bump_grad(y, width: float = 1.0) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return -y / width ** 2 * bump(y, width)


def _quantiles(v) -> dict:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        return {"median": math.nan, "mean": math.nan, "q25": math.nan, "q75": math.nan}
    q25, med, q75 = np.quantile(v, [0.25, 0.5, 0.75])
    return {"median": float(med), "mean": float(np.mean(v)), "q25": float(q25),
            "q75": float(q75)}


# ---------------------------------------------------------------------------
# per-path work

def _simulate(cfg, i, seed, out_dir):
    path = simulate(sim_config(cfg, seed))
    files = []
    if cfg.params["write_paths"]:
        name = Path("paths") / f"path_{i:05d}.csv"
        io.path_to_csv(path, Path(out_dir) / name)
        files.append(str(name))
        if cfg.params["binary"]:
            name = Path("paths") / f"path_{i:05d}.bin"
            io.save_binary(path, Path(out_dir) / name)
            files.append(str(name))
    row = {"index": i, "seed": seed, "n_events": len(path) - 1, "censored": path.censored}
    for k, v in enumerate(path.states[-1]):
        row[f"x{k + 1}_final"] = float(v)
    return {"row": row, "files": files}


def _dim_range(cfg, i, seed, out_dir):
    beta = cfg.index()
    path = simulate(sim_config(cfg, seed, beta))
    p = cfg.params
    finest = (default_finest_scale(path, cfg.epsilon, beta.beta_max)
              if p["finest"] == "auto" else float(p["finest"]))
    est = box_count_range(path, range_scales(path, finest, p["coarsest"], p["ratio"]),
                          drop_coarse=p["drop_coarse"], drop_fine=p["drop_fine"])
    return _dimension_result(cfg, i, seed, path, beta, est, "range")


def _dim_graph(cfg, i, seed, out_dir):
    beta = cfg.index()
    path = simulate(sim_config(cfg, seed, beta))
    p = cfg.params
    est = box_count_graph(path, None if p["max_depth"] == "auto" else p["max_depth"],
                          p["min_depth"], p["method"], p["drop_coarse"], p["drop_fine"])
    return _dimension_result(cfg, i, seed, path, beta, est, "graph")


def _dimension_result(cfg, i, seed, path, beta, est, kind):
    row = {"index": i, "seed": seed}
    row.update(est.summary())
    row.update({"intercept": est.intercept, "censored": path.censored,
                "prediction": predicted_dimension(path, beta, kind),
                "n_events": len(path) - 1})
    scales = [dict(index=i, **r) for r in est.rows()]
    return {"row": row, "scales": scales}


def _pvar(cfg, i, seed, out_dir):
    path = simulate(sim_config(cfg, seed))
    p = cfg.params
    depths = auto_depths(cfg.horizon, cfg.epsilon) if p["depths"] == "auto" else p["depths"]
    prof = p_variation(path, p["p_grid"], depths, p["last"])
    row = {"index": i, "seed": seed, "p_hat": prof.p_hat, "censored": path.censored}
    for k, q in enumerate(prof.p_grid):
        row[f"stabilizes_{q:g}"] = prof.stabilizes(k, p["last"])
        row[f"grows_{q:g}"] = prof.grows(k, p["last"])
    values = [dict(index=i, **r) for r in prof.rows()]
    return {"row": row, "values": values}


def _sojourn(cfg, i, seed, out_dir):
    path = simulate(sim_config(cfg, seed))
    p = cfg.params
    st = sojourn(path, p["t0"], p["a"], p["s"])
    return {"row": {"index": i, "seed": seed, "T": st.value, "censored": path.censored}}


def _couple(cfg, i, seed, out_dir):
    p = cfg.params
    sc = sim_config(cfg, seed, index_drop=p["index_drop"])
    stream = None
    if p["replay"] is not None:
        stream = io.load_stream(p["replay"], cfg.epsilon, cfg.horizon)
        sc = sim_config(cfg, stream.seed, index_drop=p["index_drop"])
    _, _, rep = simulate_coupled(sc, p["a"], stream)
    row = {"index": i, "seed": sc.seed}
    row.update(rep.as_row())
    row["censored"] = rep.extra["censored"]
    return {"row": row}


def _generator(cfg, i, seed, out_dir):
    path = simulate(sim_config(cfg, seed))
    w = cfg.params["bump_width"]
    x = path.states[-1]
    return {"row": {"index": i, "seed": seed, "f_end": bump(x, w),
                    "n_events": len(path) - 1, "censored": path.censored}}


def _heat(cfg, i, seed, out_dir):
    path = simulate(sim_config(cfg, seed))
    row = {"index": i, "seed": seed}
    for t in cfg.params["t_grid"]:
        row[f"x_t{t:g}"] = float(path_value(path, t)[0])
    row["censored"] = path.censored
    return {"row": row}


PER_PATH = {
    "simulate": _simulate,
    "dim-range": _dim_range,
    "dim-graph": _dim_graph,
    "pvar": _pvar,
    "sojourn": _sojourn,
    "couple": _couple,
    "generator-check": _generator,
    "heat-kernel": _heat,
}


# ---------------------------------------------------------------------------
# reductions

def _rows(results):
    return [r["row"] for r in results]


def _reduce_simulate(cfg, results):
    rows = _rows(results)
    return {"paths": rows}, {
        "n_paths": len(rows),
        "n_censored": sum(r["censored"] for r in rows),
        "mean_events": float(np.mean([r["n_events"] for r in rows])),
    }


def _reduce_dimension(cfg, results):
    rows = _rows(results)
    slopes = [r["slope"] for r in rows]
    rep = prediction_report([r["prediction"] for r in rows], slopes)
    q = _quantiles(slopes)
    summary = {
        "median_slope": q["median"], "mean_slope": q["mean"], "q25_slope": q["q25"],
        "q75_slope": q["q75"], "n_paths": len(rows),
        "n_flagged": sum(bool(r["flags"]) for r in rows),
        "n_censored": sum(r["censored"] for r in rows),
        "mean_prediction": rep["mean_prediction"], "mean_abs_error": rep["mean_abs_error"],
        "rank_correlation": rep["rank_correlation"],
    }
    band = cfg.params.get("band")
    if band is not None:
        summary["band"] = list(band)
        summary["passed"] = bool(band[0] <= q["median"] <= band[1])
    scales = [s for r in results for s in r["scales"]]
    return {"paths": rows, "scales": scales}, summary


def _reduce_pvar(cfg, results):
    rows = _rows(results)
    n = len(rows)
    summary = {"n_paths": n, "depths": (auto_depths(cfg.horizon, cfg.epsilon)
                                        if cfg.params["depths"] == "auto"
                                        else cfg.params["depths"])}
    for q in cfg.params["p_grid"]:
        summary[f"fraction_stabilizes_{q:g}"] = sum(r[f"stabilizes_{q:g}"] for r in rows) / n
        summary[f"fraction_grows_{q:g}"] = sum(r[f"grows_{q:g}"] for r in rows) / n
    hats = [r["p_hat"] for r in rows if r["p_hat"] is not None]
    summary["n_p_hat"] = len(hats)
    summary["median_p_hat"] = float(np.median(hats)) if hats else None
    values = [v for r in results for v in r["values"]]
    return {"paths": rows, "values": values}, summary


def sojourn_constant(beta_min: float) -> float | None:
    """``C = 2 / (1 - 1/beta_min)`` of the exponential sojourn tail, when ``beta_min > 1``."""
    return 2.0 / (1.0 - 1.0 / beta_min) if beta_min > 1 else None


def _reduce_sojourn(cfg, results):
    rows = _rows(results)
    p = cfg.params
    beta = cfg.index()
    T = np.array([r["T"] for r in rows])
    C = sojourn_constant(beta.beta_min)
    tail = []
    for lam in p["lambdas"]:
        level = lam * p["a"] * p["s"] ** (1.0 - 1.0 / beta.beta_min)
        emp = float(np.mean(T >= level))
        row = {"lambda": lam, "threshold": level, "empirical": emp, "n": T.size}
        if C is not None:
            row["bound"] = math.exp(-lam / (2 * C))
            row["passed"] = emp <= p["slack"] * row["bound"]
        tail.append(row)
    summary = {"n_paths": T.size, "C": C, "mean_T": float(T.mean()),
               "tail": tail}
    if C is not None:
        summary["passed"] = all(r["passed"] for r in tail)
    return {"paths": rows, "tail": tail}, summary


def _reduce_couple(cfg, results):
    rows = _rows(results)
    ok = [r["identical_before_tau"] and r["max_discrepancy_before_tau"] == 0 for r in rows]
    summary = {"n_paths": len(rows), "fraction_identical": sum(ok) / len(rows),
               "max_discrepancy": max(r["max_discrepancy_before_tau"] for r in rows),
               "passed": all(ok)}
    return {"reports": rows}, summary


def _reduce_generator(cfg, results):
    rows = _rows(results)
    w = cfg.params["bump_width"]
    x0 = np.asarray(cfg.x0)
    h = cfg.horizon
    diff = (np.array([r["f_end"] for r in rows]) - bump(x0, w)) / h
    est = float(diff.mean())
    se = float(diff.std(ddof=1) / math.sqrt(diff.size)) if diff.size > 1 else math.inf
    gen = apply_generator(lambda y: bump(y, w), x0, cfg.index(),
                          grad=lambda y: bump_grad(y, w))
    z = (est - gen) / se if se > 0 else math.inf
    summary = {"n_paths": diff.size, "h": h, "mc_estimate": est, "standard_error": se,
               "generator": gen, "z": z, "passed": bool(abs(z) <= cfg.params["max_z"])}
    return {"paths": rows}, summary


def _reduce_heat(cfg, results):
    rows = _rows(results)
    ts = cfg.params["t_grid"]
    ends = {t: np.array([r[f"x_t{t:g}"] for r in rows]) for t in ts}
    beta = cfg.index()
    res = heat_kernel_bound_check(ends, beta.beta_min, cfg.d, cfg.params["slack"])
    summary = {"n_paths": len(rows), "slope": res["slope"], "bound": res["bound"],
               "passed": res["passed"], "alpha": beta.beta_min}
    return {"density": res["rows"]}, summary


def run_symbol_check(cfg: ExperimentConfig):
    """Deterministic checks of the symbol numerics; no paths are simulated."""
    p = cfg.params
    beta = cfg.index()
    ca = []
    for a in p["alphas"]:
        v, ref = c_alpha(a), c_alpha_closed_form(a)
        ca.append({"alpha": a, "c_alpha": v, "closed_form": ref, "rel_err": abs(v / ref - 1)})
    fourier = []
    for x in p["x_grid"]:
        for xi in p["xi_grid"]:
            fourier.append({"x": x, "xi": xi, "rel_gap": symbol_fourier_check([x], xi, beta)})
    waves = []
    for d in p["wave_dims"]:
        x = np.linspace(0.3, -0.1, d)
        for s in p["wave_xi"]:
            xi = s * np.linspace(1.0, 0.5, d)

            def f(y, xi=xi):
                return math.cos(float(xi @ y))

            def g(y, xi=xi):
                return -math.sin(float(xi @ y)) * xi

            val = apply_generator(f, x, beta, grad=g)
            exact = -symbol(x, xi, beta).value * f(x)
            waves.append({"d": d, "xi_norm": float(np.linalg.norm(xi)), "generator": val,
                          "expected": exact, "rel_err": abs(val / exact - 1)})
    summary = {
        "max_rel_err_c_alpha": max(r["rel_err"] for r in ca),
        "max_rel_gap_fourier": max(r["rel_gap"] for r in fourier),
        "max_rel_err_generator": max(r["rel_err"] for r in waves),
    }
    summary["passed"] = bool(summary["max_rel_err_c_alpha"] <= p["tol_c_alpha"]
                             and summary["max_rel_gap_fourier"] <= p["tol_fourier"]
                             and summary["max_rel_err_generator"] <= p["tol_generator"])
    return {"c_alpha": ca, "fourier": fourier, "plane_waves": waves}, summary


REDUCERS = {
    "simulate": _reduce_simulate,
    "dim-range": _reduce_dimension,
    "dim-graph": _reduce_dimension,
    "pvar": _reduce_pvar,
    "sojourn": _reduce_sojourn,
    "couple": _reduce_couple,
    "generator-check": _reduce_generator,
    "heat-kernel": _reduce_heat,
}
