"""Compiled inner loops (numba)."""

import numpy as np
from numba import njit

from .core import KIND_BUMP, KIND_CONSTANT


@njit(cache=True)
def index_at(x, kind, params, knots, values, floor):
    if kind == KIND_CONSTANT:
        b = params[0]
    elif kind == KIND_BUMP:
        sq = 0.0
        for c in range(x.shape[0]):
            sq += x[c] * x[c]
        b = params[0] + params[1] / (1.0 + sq / (params[2] * params[2]))
    else:
        b = np.interp(x[0], knots, values)
    return max(b, floor)


@njit(cache=True)
def integrate(x0, theta, r, kind, params, knots, values, floor, limit, states, betas):
    """Apply ``X <- X + theta * r**(1/beta(X))`` event by event.

    ``states`` has one more row than there are events; ``betas[k]`` receives the
    index at the pre-jump state of event k. Returns the number of events applied
    before the state left the ball of radius ``limit`` or became non-finite
    (``-1`` when every event was applied).
    """
    d = x0.shape[0]
    x = x0.copy()
    for c in range(d):
        states[0, c] = x[c]
    for k in range(r.shape[0]):
        b = index_at(x, kind, params, knots, values, floor)
        betas[k] = b
        mag = r[k] ** (1.0 / b)
        sq = 0.0
        for c in range(d):
            x[c] = x[c] + theta[k, c] * mag
            states[k + 1, c] = x[c]
            sq += x[c] * x[c]
        if not (sq <= limit * limit):
            return k + 1
    return -1
