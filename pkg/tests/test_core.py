import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from stablelike.core import (IndexFunction, SamplePath, check_index_invariants, clamped,
                             constant, entry_range, eval_index, oscillation, path_value,
                             rational_bump, sup_index_along, table)


def step_path(times, values, horizon=1.0):
    x = np.asarray(values, dtype=float)
    flags = np.ones(len(times), dtype=bool)
    flags[0] = False
    return SamplePath(np.asarray(times, dtype=float), x, flags, horizon)


def test_eval_index_examples():
    assert eval_index(constant(1.5), [3.2]) == 1.5
    assert eval_index(clamped(constant(0.7), 1.1), [-40.0]) == 1.1
    assert eval_index(rational_bump(), [0.0]) == pytest.approx(1.4, abs=1e-15)
    assert eval_index(rational_bump(), [1.0]) == pytest.approx(1.0, abs=1e-15)


def test_eval_index_vectorised_and_scalar_agree():
    b = rational_bump()
    pts = np.linspace(-3, 3, 11).reshape(-1, 1)
    vec = eval_index(b, pts)
    assert vec.shape == (11,)
    assert np.allclose(vec, [eval_index(b, p) for p in pts], rtol=0, atol=0)


def test_eval_index_rejects_nonfinite():
    with pytest.raises(ValueError):
        eval_index(constant(1.0), [np.nan])
    with pytest.raises(ValueError):
        eval_index(rational_bump(), np.array([[0.0], [np.inf]]))


def test_index_range_validation():
    with pytest.raises(ValueError):
        constant(2.0)
    with pytest.raises(ValueError):
        constant(0.0)
    with pytest.raises(ValueError):
        clamped(constant(1.0), 2.5)


def test_table_interpolates_and_checks_lipschitz():
    t = table([0.0, 1.0, 2.0], [0.5, 1.5, 1.0])
    assert eval_index(t, [0.5]) == pytest.approx(1.0)
    assert eval_index(t, [-5.0]) == 0.5 and eval_index(t, [7.0]) == 1.0
    assert t.lipschitz_const == pytest.approx(1.0)
    with pytest.raises(ValueError):
        table([0.0, 1.0], [0.5, 1.5], lipschitz=0.5)


def test_clamp_idempotent_on_probe_grid():
    b = rational_bump()
    once = clamped(b, 1.0)
    twice = clamped(once, 1.0)
    pts = np.linspace(-5, 5, 1001).reshape(-1, 1)
    assert np.array_equal(eval_index(once, pts), eval_index(twice, pts))
    assert once.program()[4] == twice.program()[4]


def test_descriptor_round_trip():
    for b in (constant(0.9), rational_bump(0.5, 1.0, 2.0), table([0, 1], [0.7, 1.2]),
              clamped(rational_bump(), 1.0)):
        again = IndexFunction.from_dict(b.to_dict())
        pts = np.linspace(-4, 4, 50).reshape(-1, 1)
        assert np.array_equal(eval_index(b, pts), eval_index(again, pts))
        assert again.lipschitz_const == b.lipschitz_const


@pytest.mark.parametrize("d", [1, 2, 3])
def test_index_invariants_hold_on_probe_grid(d):
    res = check_index_invariants(rational_bump(), d, n=4096)
    assert 0.6 <= res["min"] <= res["max"] <= 1.4
    # the bump slope bound 0.8 * 3 sqrt(3) / 8 is attained, so the probe should get close
    assert res["max_slope"] > 0.8 * rational_bump().lipschitz_const


def test_index_invariants_detect_false_constant():
    bad = IndexFunction("rational_bump", (0.6, 0.8, 1.0), 0.01, 0.6, 1.4)
    with pytest.raises(AssertionError):
        check_index_invariants(bad, 1, n=1024)


def test_path_value_examples():
    p = SamplePath.constant([2.0], 1.0)
    assert path_value(p, 0.5)[0] == 2.0
    q = step_path([0.0, 0.3], [[0.0], [1.0]])
    assert path_value(q, 0.3)[0] == 1.0
    assert path_value(q, 0.2999)[0] == 0.0
    with pytest.raises(ValueError):
        path_value(q, 1.5)


def test_path_value_right_continuous_at_every_stored_time():
    rng = np.random.default_rng(1)
    t = np.concatenate(([0.0], np.sort(rng.random(40))))
    x = rng.normal(size=(41, 1))
    p = step_path(t, x)
    for k in range(41):
        assert path_value(p, t[k])[0] == x[k, 0]


def test_path_validation():
    with pytest.raises(ValueError):
        step_path([0.1, 0.3], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        step_path([0.0, 0.3, 0.3], [[0.0], [1.0], [2.0]])
    with pytest.raises(ValueError):
        step_path([0.0, 1.3], [[0.0], [1.0]])


def test_oscillation_examples():
    assert oscillation(SamplePath.constant([1.0], 1.0), (0.0, 1.0)) == 0.0
    p = step_path([0.0, 0.2, 0.4], [[0.0], [2.0], [-1.0]])
    assert oscillation(p, (0.0, 1.0)) == 3.0
    # the left-limit entry at s is included
    assert oscillation(p, (0.3, 1.0)) == 3.0
    q = step_path([0.0, 0.5], [[0.0, 0.0], [3.0, 4.0]])
    assert oscillation(q, (0.0, 1.0)) == 5.0
    with pytest.raises(ValueError):
        oscillation(p, (0.5, 0.2))


def test_oscillation_large_planar_cloud_uses_hull():
    rng = np.random.default_rng(3)
    n = 5000
    x = rng.normal(size=(n, 2))
    p = step_path(np.linspace(0, 0.99, n), x)
    from scipy.spatial.distance import pdist
    assert oscillation(p, (0.0, 1.0)) == pytest.approx(pdist(x).max(), rel=1e-12)


def test_sup_index_along_examples():
    b = rational_bump()
    assert sup_index_along(SamplePath.constant([0.0], 1.0), constant(0.8)) == 0.8
    assert sup_index_along(SamplePath.constant([0.0], 1.0), b) == pytest.approx(1.4)
    p = step_path([0.0, 0.5], [[0.0], [1.0]])
    assert sup_index_along(p, b) == pytest.approx(1.4)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=30),
       st.floats(0.0, 0.98), st.floats(0.01, 0.5))
def test_sup_index_monotone_in_interval(vals, s, w):
    n = len(vals)
    p = step_path(np.linspace(0, 0.99, n), np.reshape(vals, (-1, 1)))
    b = rational_bump()
    inner = (s, min(s + w, 1.0))
    outer = (max(s - 0.1, 0.0), min(s + w + 0.1, 1.0))
    assert sup_index_along(p, b, inner) <= sup_index_along(p, b, outer)
    assert sup_index_along(p, b, outer) <= sup_index_along(p, b)


def test_entry_range_inclusive():
    p = step_path([0.0, 0.2, 0.4, 0.6], [[0.0], [1.0], [2.0], [3.0]])
    assert entry_range(p, 0.1, 0.5) == (0, 2)
    assert entry_range(p, 0.2, 0.6) == (1, 3)


def test_paths_are_immutable():
    p = step_path([0.0, 0.5], [[0.0], [1.0]])
    with pytest.raises(ValueError):
        p.states[0, 0] = 5.0
