"""Regenerate tests/data/oracles.json.

Every value here comes from mpmath at 30 digits and never imports the
package, so the tests compare two independent computations.

    python3 tests/make_oracles.py
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30


def c_alpha(a):
    a = mp.mpf(a)
    # r = u^m with m = 1/(2 - a) turns the r^(1-a) end-point behaviour into a smooth one;
    # 2 sin^2(r/2) avoids the cancellation in 1 - cos r
    m = 1 / (2 - a)
    head = mp.quad(lambda u: 2 * mp.sin(u ** m / 2) ** 2 * u ** (-m * (1 + a)) * m * u ** (m - 1),
                   [0, 1])
    tail = 1 / a - mp.quadosc(lambda r: mp.cos(r) * r ** (-1 - a), [1, mp.inf], omega=1)
    return head + tail


def sphere_moment(a, d):
    if d == 1:
        return mp.mpf(1)
    c = mp.mpf(d - 3) / 2
    norm = mp.quad(lambda t: (1 - t * t) ** c, [-1, 0, 1])
    return mp.quad(lambda t: abs(t) ** a * (1 - t * t) ** c, [-1, 0, 1]) / norm


def symbol_coeff(b, d):
    return b * c_alpha(b) * sphere_moment(b, d)


def gaussian_generator_at_0(b, d):
    """L f(0) for f(y) = exp(-|y|^2/2): -(2 pi)^-d int q(xi) (2 pi)^(d/2) e^(-|xi|^2/2) dxi."""
    b = mp.mpf(b)
    a = symbol_coeff(b, d)
    # radial integral of |xi|^b e^{-|xi|^2/2} over R^d, divided by (2 pi)^(d/2)
    surface = 2 * mp.pi ** (mp.mpf(d) / 2) / mp.gamma(mp.mpf(d) / 2)
    radial = mp.quad(lambda r: r ** (b + d - 1) * mp.exp(-r * r / 2), [0, mp.inf])
    return -a * surface * radial / (2 * mp.pi) ** (mp.mpf(d) / 2)


def stable_peak(b, t):
    """Density at 0 of the d = 1 law with exponent t a |xi|^b."""
    a = symbol_coeff(b, 1)
    return mp.quad(lambda x: mp.exp(-t * a * x ** b), [0, mp.inf]) / mp.pi


def lipschitz_lhs(bx, by):
    px, py = 1 / mp.mpf(bx), 1 / mp.mpf(by)
    return mp.quad(lambda r: (r ** px - r ** py) ** 2 / r ** 2, [0, 1])


def bump(x, low=0.6, amp=0.8, width=1.0):
    return low + amp / (1 + (x / width) ** 2)


out = {
    "c_alpha": {str(a): float(c_alpha(a)) for a in
                (0.05, 0.3, 0.5, 0.7, 1.0, 1.3, 1.5, 1.7, 1.9, 1.95)},
    "sphere_moment": {f"{d},{a}": float(sphere_moment(a, d)) for d in (1, 2, 3, 4)
                      for a in (0.5, 1.0, 1.5)},
    "gaussian_generator_at_0": {f"{d},{b}": float(gaussian_generator_at_0(b, d))
                                for d in (1, 2) for b in (0.7, 1.5)},
    "stable_peak_1.5": {str(t): float(stable_peak(1.5, t)) for t in (0.01, 0.04, 0.16)},
    "lipschitz_lhs_bump": {f"{x},{y}": float(lipschitz_lhs(bump(x), bump(y)))
                           for x, y in ((0.0, 0.1), (0.5, 1.0), (-2.0, 1.0))},
    "jump_magnitude_r0.25_b1.9": float(mp.mpf("0.25") ** (1 / mp.mpf("1.9"))),
    "truncation_bound": {"1.0,1e-4": 1e-4, "1.5,1e-6": float(3 * mp.mpf("1e-6") ** (mp.mpf(1) / 3))},
}
path = Path(__file__).with_name("data") / "oracles.json"
path.write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
print(json.dumps(out, indent=2, sort_keys=True))
