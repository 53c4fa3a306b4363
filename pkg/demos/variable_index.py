"""A state-dependent index: the dimension is decided by where the path goes.

The rational bump index is 1.4 at the origin and decays to 0.6 far away. A
path started at x = 2 wanders over a region where beta varies, and the
range dimension of each path tracks the largest index it visited, not the
global extremes 0.6 or 1.4.

    python3 demos/variable_index.py
"""

import numpy as np

from stablelike.core import rational_bump, sup_index_along
from stablelike.fractal import (box_count_range, default_finest_scale, predicted_dimension,
                                prediction_report, range_scales)
from stablelike.jumps import derive_seeds
from stablelike.sde import SimulationConfig, simulate

beta = rational_bump()
preds, slopes = [], []
for seed in derive_seeds(11, 60):
    cfg = SimulationConfig.auto(beta, (2.0,), seed=seed)
    path = simulate(cfg)
    scales = range_scales(path, default_finest_scale(path, cfg.epsilon, beta.beta_max), 0.25)
    slopes.append(box_count_range(path, scales).slope)
    preds.append(predicted_dimension(path, beta, "range"))

rep = prediction_report(preds, slopes)
print(f"rank correlation     {rep['rank_correlation']:.3f}")
print(f"mean absolute error  {rep['mean_abs_error']:.3f}")
print(f"mean estimate        {rep['mean_estimate']:.3f}   (global bounds 0.6 and 1.4)")
print("\nsup index  estimate")
for p, s in sorted(zip(preds, slopes))[::6]:
    print(f"{p:9.3f} {s:9.3f}")
