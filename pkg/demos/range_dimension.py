"""Range dimension of stable-like paths.

The box-counting slope of the visited set follows min(d, beta): a subcritical
index gives a thin, dust-like range and a supercritical one fills the line.

    python3 demos/range_dimension.py
"""

import numpy as np

from stablelike.core import constant
from stablelike.fractal import box_count_range, default_finest_scale, range_scales
from stablelike.jumps import derive_seeds
from stablelike.sde import SimulationConfig, simulate

N_PATHS = 20

for alpha in (0.7, 1.5):
    beta = constant(alpha)
    slopes = []
    for seed in derive_seeds(2024, N_PATHS):
        cfg = SimulationConfig.auto(beta, (0.0,), seed=seed)
        path = simulate(cfg)
        finest = default_finest_scale(path, cfg.epsilon, alpha)
        est = box_count_range(path, range_scales(path, finest, 0.25))
        slopes.append(est.slope)
    print(f"beta = {alpha}: median slope {np.median(slopes):.3f} "
          f"(predicted {min(alpha, 1.0):.2f}), spread {np.std(slopes):.3f}")

# the last fit, scale by scale, for a log-log plot
print("\n   scale     count  in fit")
for row in est.rows():
    print(f"{row['scale']:.2e} {row['count']:8d}  {row['in_window']}")
