"""Experiment orchestration: worker pool, output files and run manifests.

Determinism contract: path ``i`` of a run is driven by
``derive_seeds(config.seed, n_paths)[i]`` whatever worker executes it, the
per-path results are reduced in index order, and every digested file is a
function of the resolved config alone. Wall-clock time and the worker count
live in the manifest but never in a digested file.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .. import __version__, io
from ..jumps import derive_seeds
from .config import ConfigError, ExperimentConfig, validate
from .experiments import PER_PATH, REDUCERS, run_symbol_check

__all__ = ["OUT_ENV", "RunManifest", "map_ordered", "run", "rerun", "default_out_dir"]

OUT_ENV = "STABLELIKE_OUT"


@dataclass
class RunManifest:
    config: dict
    code_version: str
    seeds: list[int]
    digests: dict[str, str]
    summary: dict
    wall_clock: float = 0.0
    workers: int = 1
    out_dir: str = ""
    warnings: list[str] = field(default_factory=list)

    def write(self, file) -> Path:
        return io.write_json(file, asdict(self))

    @classmethod
    def load(cls, file) -> "RunManifest":
        doc = json.loads(Path(file).read_text(encoding="utf-8"))
        return cls(**doc)

    def verify(self, root=None) -> dict[str, bool]:
        """Recompute every digest under ``root`` (default: the manifest's directory)."""
        root = Path(root or self.out_dir)
        return {name: (root / name).is_file() and io.sha256_file(root / name) == dig
                for name, dig in self.digests.items()}


def default_out_dir(config: ExperimentConfig) -> Path:
    base = Path(os.environ.get(OUT_ENV, "stablelike-runs"))
    return base / f"{config.experiment}-seed{config.seed}"


def _job(args):
    experiment, cfg_doc, out_dir, batch = args
    cfg = ExperimentConfig.from_dict(cfg_doc)
    fn = PER_PATH[experiment]
    return [fn(cfg, i, seed, out_dir) for i, seed in batch]


def map_ordered(fn: Callable, items: Sequence, workers: int = 1,
                chunks_per_worker: int = 4) -> list:
    """``[fn(x) for x in items]`` over a process pool, results in input order."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _batches(seeds: list[int], workers: int) -> list[list[tuple[int, int]]]:
    n = len(seeds)
    size = max(1, math.ceil(n / (max(workers, 1) * 4)))
    pairs = list(enumerate(seeds))
    return [pairs[k:k + size] for k in range(0, n, size)]


def run(config: ExperimentConfig, workers: int = 1, out_dir=None) -> RunManifest:
    """Execute ``config`` and write its CSV tables, JSON summary and manifest.

    Raises :class:`ConfigError` listing every invalid field. Exploded paths
    are kept as censored rows and the run continues.
    """
    diags = validate(config)
    errors = [d for d in diags if d.level == "error"]
    if errors:
        raise ConfigError(errors)
    cfg = config.resolved()
    out = Path(out_dir or cfg.out_dir or default_out_dir(cfg))
    out.mkdir(parents=True, exist_ok=True)
    doc = cfg.to_dict()
    doc["out_dir"] = None   # location is not part of what ran
    start = time.perf_counter()
    files: list[str] = []
    if cfg.experiment == "symbol-check":
        seeds: list[int] = []
        tables, summary = run_symbol_check(cfg)
    else:
        seeds = derive_seeds(cfg.seed, cfg.n_paths)
        jobs = [(cfg.experiment, doc, str(out), b) for b in _batches(seeds, workers)]
        results = [r for batch in map_ordered(_job, jobs, workers) for r in batch]
        for r in results:
            files.extend(r.get("files", []))
        tables, summary = REDUCERS[cfg.experiment](cfg, results)
    for name, rows in tables.items():
        io.write_csv(out / f"{name}.csv", rows, _header(rows))
        files.append(f"{name}.csv")
    summary = {"experiment": cfg.experiment, **summary}
    io.write_json(out / "summary.json", summary)
    files.append("summary.json")
    digests = {name: io.sha256_file(out / name) for name in sorted(files)}
    manifest = RunManifest(doc, __version__, seeds, digests, summary,
                           wall_clock=time.perf_counter() - start, workers=workers,
                           out_dir=str(out), warnings=[str(d) for d in diags])
    manifest.write(out / "manifest.json")
    return manifest


def _header(rows: list[dict]) -> list[str]:
    # union of keys in first-seen order, so optional columns are not dropped
    keys: dict[str, None] = {}
    for r in rows:
        for k in r:
            keys.setdefault(k, None)
    return list(keys)


def rerun(manifest_file, workers: int = 1, out_dir=None) -> tuple[RunManifest, dict[str, bool]]:
    """Run a manifest's config again and compare every CSV/JSON digest."""
    old = RunManifest.load(manifest_file)
    cfg = ExperimentConfig.from_dict(old.config)
    target = Path(out_dir) if out_dir else Path(manifest_file).parent / "rerun"
    new = run(cfg, workers=workers, out_dir=target)
    same = {name: new.digests.get(name) == dig for name, dig in old.digests.items()}
    for name in set(new.digests) - set(old.digests):
        same[name] = False
    return new, same
