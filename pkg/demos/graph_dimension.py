"""Graph dimension on the line.

For d = 1 the graph {(t, X_t)} has dimension max(1, 2 - 1/beta): above
beta = 1 the path oscillates enough to thicken the graph, below it the graph
is as thin as a curve.

    python3 demos/graph_dimension.py
"""

import numpy as np

from stablelike.core import constant
from stablelike.fractal import box_count_graph
from stablelike.jumps import derive_seeds
from stablelike.sde import SimulationConfig, simulate

for alpha in (0.7, 1.2, 1.5, 1.8):
    beta = constant(alpha)
    slopes = [box_count_graph(simulate(SimulationConfig.auto(beta, (0.0,), seed=s))).slope
              for s in derive_seeds(7, 20)]
    print(f"beta = {alpha}: median graph slope {np.median(slopes):.3f}, "
          f"predicted {max(1.0, 2 - 1 / alpha):.3f}")
