import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablelike.core import clamped, constant, rational_bump, table
from stablelike.symbol import (apply_generator, beta_infinity, c_alpha, c_alpha_closed_form,
                               growth_integral, lipschitz_constant_bound,
                               lipschitz_quadrature_check, sphere_moment,
                               sphere_moment_closed_form, symbol, symbol_fourier_check,
                               symbol_growth_ratio)


def test_closed_form_validated_by_brute_force(oracles):
    # the Gamma formula is trusted only after it matches the mpmath quadrature
    for a, ref in oracles["c_alpha"].items():
        assert c_alpha_closed_form(float(a)) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("a", [0.3, 0.5, 0.9, 1.1, 1.5, 1.9])
def test_c_alpha_matches_closed_form(a):
    assert c_alpha(a) == pytest.approx(c_alpha_closed_form(a), rel=1e-6)


def test_c_alpha_examples(oracles):
    assert c_alpha(1.0) == pytest.approx(math.pi / 2, rel=1e-10)
    assert c_alpha(0.5) == pytest.approx(2.5066, abs=1e-4)
    for a, ref in oracles["c_alpha"].items():
        assert c_alpha(float(a)) == pytest.approx(ref, rel=1e-8)


@pytest.mark.parametrize("a", [0.0, 0.04, 1.96, 2.0, -1.0])
def test_c_alpha_guard_band(a):
    with pytest.raises(ValueError):
        c_alpha(a)


def test_sphere_moment(oracles):
    assert sphere_moment(0.7, 1) == 1.0
    assert sphere_moment(1.0, 3) == pytest.approx(0.5, rel=1e-12)
    assert sphere_moment(1.0, 2) == pytest.approx(2 / math.pi, rel=1e-12)
    for key, ref in oracles["sphere_moment"].items():
        d, a = key.split(",")
        assert sphere_moment(float(a), int(d)) == pytest.approx(ref, rel=1e-10)
        assert sphere_moment_closed_form(float(a), int(d)) == pytest.approx(ref, rel=1e-10)
    with pytest.raises(ValueError):
        sphere_moment(1.0, 0)


def test_symbol_examples():
    q = symbol([0.0], [1.0], constant(1.0))
    assert q.value == pytest.approx(math.pi / 2, rel=1e-12)
    assert q.value == q.a_of_x * 1.0 ** q.beta
    assert symbol([0.0], [0.0], constant(1.3)).value == 0.0
    b = rational_bump()
    for x in (-1.0, 0.3, 2.0):
        r = symbol([x], [2.0], b).value / symbol([x], [1.0], b).value
        assert r == pytest.approx(2 ** b([x]), rel=1e-12)
    assert symbol([0.1, 0.2], [1.0, -2.0], b).a_of_x > 0


def test_symbol_rejects_index_outside_guard_band():
    with pytest.raises(ValueError):
        symbol([0.0], [1.0], constant(1.98))


@pytest.mark.parametrize("beta,xi", [(constant(1.0), 1.0), (constant(1.5), 3.0),
                                     (rational_bump(), -0.7), (constant(0.4), 12.0)])
def test_symbol_fourier_check(beta, xi):
    assert symbol_fourier_check([0.2], xi, beta) <= 1e-4


def test_beta_infinity():
    assert beta_infinity(constant(0.9)) == 0.9
    assert beta_infinity(rational_bump(), verify=True) == 1.4
    assert beta_infinity(clamped(constant(0.7), 1.2)) == 1.2
    assert beta_infinity(table([0, 1], [0.8, 1.3]), verify=True) == 1.3


def test_growth_ratio_direction():
    pts = np.linspace(-3, 3, 13).reshape(-1, 1)
    b = rational_bump()
    up = [symbol_growth_ratio(b, s, 1.45, pts) for s in (1e2, 1e4, 1e6)]
    down = [symbol_growth_ratio(b, s, 1.35, pts) for s in (1e2, 1e4, 1e6)]
    assert up[0] > up[1] > up[2]
    assert down[0] < down[1] < down[2]


def cosine_wave(xi):
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    return (lambda y: math.cos(float(xi @ y)),
            lambda y: -math.sin(float(xi @ y)) * xi)


@pytest.mark.parametrize("beta", [constant(0.7), constant(1.5), rational_bump()])
@pytest.mark.parametrize("d,xi,x", [(1, [1.3], [0.3]), (1, [4.0], [0.1]),
                                    (2, [1.3, -0.7], [0.3, 0.2])])
def test_plane_waves_are_eigenfunctions(beta, d, xi, x):
    f, g = cosine_wave(xi)
    val = apply_generator(f, x, beta, grad=g)
    exact = -symbol(x, xi, beta).value * f(np.asarray(x))
    assert val == pytest.approx(exact, rel=1e-3)


def test_generator_of_sine_wave():
    xi = np.array([2.0])
    f = lambda y: math.sin(float(xi @ y))
    g = lambda y: math.cos(float(xi @ y)) * xi
    x = np.array([0.4])
    val = apply_generator(f, x, constant(1.2), grad=g)
    assert val == pytest.approx(-symbol(x, xi, constant(1.2)).value * f(x), rel=1e-3)


def test_generator_of_constant_vanishes_as_far_field_grows():
    # beyond `far` the integrand is taken as -f(x), exact only when f decays
    b = rational_bump()
    r1 = apply_generator(lambda y: 3.0, [0.5], b, far=256.0)
    r2 = apply_generator(lambda y: 3.0, [0.5], b, far=1024.0)
    assert abs(r2) < 1e-2
    assert abs(r1 / r2) == pytest.approx(4.0 ** b([0.5]), rel=1e-3)


@pytest.mark.parametrize("d", [1, 2])
@pytest.mark.parametrize("b", [0.7, 1.5])
def test_generator_on_gaussian_bump(oracles, d, b):
    f = lambda y: math.exp(-0.5 * float(np.dot(y, y)))
    g = lambda y: -np.asarray(y) * f(y)
    val = apply_generator(f, np.zeros(d), constant(b), grad=g)
    assert val == pytest.approx(oracles["gaussian_generator_at_0"][f"{d},{b}"], rel=1e-4)


def test_generator_numeric_gradient_matches_exact():
    f, g = cosine_wave([1.1])
    a = apply_generator(f, [0.2], constant(1.3), grad=g)
    b = apply_generator(f, [0.2], constant(1.3))
    assert a == pytest.approx(b, rel=1e-5)


@pytest.mark.parametrize("b", [0.3, 0.7, 1.0, 1.5, 1.9])
def test_growth_integral_closed_form(b):
    assert growth_integral(b) == pytest.approx(1 / (2 / b - 1), rel=1e-10)
    assert growth_integral(b) <= 1 / (2 / 1.9 - 1)


def test_lipschitz_check_examples(oracles):
    b = rational_bump()
    assert lipschitz_quadrature_check([0.3], [0.3], b)[0] == 0.0
    for key, ref in oracles["lipschitz_lhs_bump"].items():
        x, y = (float(v) for v in key.split(","))
        lhs, rhs = lipschitz_quadrature_check([x], [y], b)
        assert lhs == pytest.approx(ref, rel=1e-8)
        assert lhs <= rhs


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_lipschitz_bound_on_random_pairs(x, y):
    lhs, rhs = lipschitz_quadrature_check([x], [y], rational_bump())
    assert 0 <= lhs <= rhs


def test_lipschitz_constant_formula():
    b = rational_bump()
    eps0 = 0.5 * (2 / 1.4 - 1)
    expect = (b.lipschitz_const / 0.36) ** 2 * (2 / (math.e * eps0)) ** 2 / eps0
    assert lipschitz_constant_bound(b) == pytest.approx(expect, rel=1e-14)


def test_fourier_check_rejects_zero_frequency():
    with pytest.raises(ValueError):
        symbol_fourier_check([0.0], 0.0, constant(1.0))
