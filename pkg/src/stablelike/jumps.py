"""Truncated Poisson random measure on time x sphere x radial marks.

The driving measure has intensity ``dt (x) H(dtheta) (x) r^-2 dr`` with ``H``
the uniform law on the unit sphere. Keeping only marks ``r > eps`` leaves a
finite measure of mass ``T / eps`` per path, which is sampled exactly:

* the event count is Poisson(T / eps),
* given the count, times are i.i.d. uniform on (0, T] and sorted,
* marks follow the Pareto(1) law ``P(r > m) = eps / m``, drawn as ``eps / U``,
* directions are normalised Gaussian vectors (random signs when d = 1).

Randomness comes from numpy's counter-based Philox bit generator keyed by a
64-bit seed. Batches of paths get their seeds from :func:`derive_seeds`, which
spawns independent children of one root :class:`numpy.random.SeedSequence`;
the i-th seed depends only on ``(root, i)``, never on the worker that uses it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "JumpEvent",
    "JumpStream",
    "make_rng",
    "derive_seeds",
    "radial_inverse_cdf",
    "sample_direction",
    "sample_stream",
    "first_large_jump_time",
]


class JumpEvent(NamedTuple):
    t: float
    theta: np.ndarray
    r: float


@dataclass(frozen=True)
class JumpStream:
    """Time-ordered atoms of the truncated measure, stored column-wise."""

    t: np.ndarray
    theta: np.ndarray
    r: np.ndarray
    epsilon: float
    horizon: float
    seed: int
    d: int

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        theta = np.asarray(self.theta, dtype=float).reshape(t.size, self.d)
        r = np.asarray(self.r, dtype=float)
        if r.shape != t.shape:
            raise ValueError("t and r must have equal length")
        if t.size and (t[0] <= 0 or t[-1] > self.horizon or np.any(np.diff(t) <= 0)):
            raise ValueError("event times must be strictly increasing inside (0, T]")
        if np.any(r <= self.epsilon):
            raise ValueError("radial marks must exceed epsilon")
        for name, arr in (("t", t), ("theta", theta), ("r", r)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return self.t.size

    def __iter__(self):
        for k in range(self.t.size):
            yield JumpEvent(float(self.t[k]), self.theta[k], float(self.r[k]))

    @classmethod
    def from_events(cls, events, epsilon: float, horizon: float, d: int,
                    seed: int = 0) -> "JumpStream":
        """Build a stream from ``(t, theta, r)`` triples (sorted by time, stably)."""
        events = sorted(events, key=lambda e: e[0])
        t = np.array([e[0] for e in events], dtype=float)
        theta = np.array([np.atleast_1d(e[1]) for e in events], dtype=float).reshape(-1, d)
        r = np.array([e[2] for e in events], dtype=float)
        return cls(t, theta, r, float(epsilon), float(horizon), int(seed), int(d))

    @property
    def large(self) -> np.ndarray:
        """Mask of the non-compensated atoms, ``r >= 1``."""
        return self.r >= 1.0


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(int(seed)))


def derive_seeds(root_seed: int, n: int) -> list[int]:
    """``n`` independent 64-bit stream seeds split off ``root_seed``."""
    children = np.random.SeedSequence(int(root_seed)).spawn(n)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def radial_inverse_cdf(u, epsilon: float):
    """Invert ``P(r > m) = epsilon / m``: a uniform ``u`` in (0, 1] maps to ``epsilon / u``."""
    return epsilon / np.asarray(u, dtype=float)


def sample_direction(d: int, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Uniform point(s) on the unit sphere of R^d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    n = 1 if size is None else size
    if d == 1:
        out = (2.0 * rng.integers(0, 2, size=(n, 1)) - 1.0)
    else:
        g = rng.standard_normal((n, d))
        out = g / np.linalg.norm(g, axis=1, keepdims=True)
    return out[0] if size is None else out


def sample_stream(T: float, epsilon: float, d: int, seed: int) -> JumpStream:
    if not T > 0:
        raise ValueError("horizon T must be positive")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    rng = make_rng(seed)
    n = int(rng.poisson(T / epsilon))
    t = np.sort(T * (1.0 - rng.random(n)))          # uniform on (0, T]
    r = radial_inverse_cdf(1.0 - rng.random(n), epsilon)  # U in (0, 1]
    r[r <= epsilon] = np.nextafter(epsilon, math.inf)
    theta = sample_direction(d, rng, size=n)
    # exact ties have probability ~2^-53 per pair; nudge forward to keep order strict
    if n > 1 and np.any(np.diff(t) <= 0):
        for k in range(1, n):
            if t[k] <= t[k - 1]:
                t[k] = np.nextafter(t[k - 1], math.inf)
        if t[-1] > T:
            raise RuntimeError("could not break a tie at the horizon")
    return JumpStream(t, theta, r, float(epsilon), float(T), int(seed), int(d))


def first_large_jump_time(stream: JumpStream) -> float | None:
    """Time of the first atom with ``r >= 1``, or ``None``."""
    idx = np.flatnonzero(stream.large)
    return float(stream.t[idx[0]]) if idx.size else None
