import math

import numpy as np
import pytest
from scipy import stats

from stablelike.jumps import (JumpStream, derive_seeds, first_large_jump_time, make_rng,
                              radial_inverse_cdf, sample_direction, sample_stream)


def test_expected_event_count():
    # pi((eps, inf)) = 1/eps, so T = 1, eps = 0.5 gives mean 2
    counts = np.array([len(sample_stream(1.0, 0.5, 1, s)) for s in range(20000)])
    se = math.sqrt(2.0 / counts.size)
    assert abs(counts.mean() - 2.0) < 5 * se


def test_count_mean_and_variance_match_poisson():
    counts = np.array([len(sample_stream(1.0, 0.01, 1, s)) for s in derive_seeds(4, 10000)])
    lam = 100.0
    assert abs(counts.mean() - lam) < 5 * math.sqrt(lam / counts.size)
    # var of the sample variance of Poisson: (mu4 - sigma^4)/n with mu4 = lam + 3 lam^2
    se_var = math.sqrt((lam + 2 * lam ** 2) / counts.size)
    assert abs(counts.var(ddof=1) - lam) < 5 * se_var


def test_inverse_cdf_example():
    assert radial_inverse_cdf(0.5, 0.1) == pytest.approx(0.2)


def test_radial_law_tail():
    eps = 1e-3
    s = sample_stream(100.0, eps, 1, 11)
    n = len(s)
    for m in (2e-3, 1e-2, 0.1, 1.0, 10.0):
        p = eps / m
        emp = np.mean(s.r > m)
        assert abs(emp - p) < 5 * math.sqrt(p * (1 - p) / n) + 1e-12


def test_large_jump_fraction_is_eps():
    eps = 0.01
    s = sample_stream(200.0, eps, 1, 5)
    frac = s.large.mean()
    assert abs(frac - eps) < 5 * math.sqrt(eps / len(s))


def test_stream_invariants_and_determinism():
    a = sample_stream(1.0, 1e-3, 3, 42)
    b = sample_stream(1.0, 1e-3, 3, 42)
    assert np.array_equal(a.t, b.t) and np.array_equal(a.r, b.r)
    assert np.array_equal(a.theta, b.theta)
    assert np.all(np.diff(a.t) > 0) and a.t[0] > 0 and a.t[-1] <= 1.0
    assert np.all(a.r > a.epsilon)
    assert np.allclose(np.linalg.norm(a.theta, axis=1), 1.0, atol=1e-12)
    c = sample_stream(1.0, 1e-3, 3, 43)
    assert not np.array_equal(a.t[:10], c.t[:10])


@pytest.mark.parametrize("bad", [dict(T=0.0), dict(epsilon=0.0), dict(epsilon=1.0),
                                 dict(d=0)])
def test_sample_stream_rejects_bad_arguments(bad):
    args = dict(T=1.0, epsilon=0.1, d=1, seed=0)
    args.update(bad)
    with pytest.raises(ValueError):
        sample_stream(**args)


def test_directions():
    rng = make_rng(0)
    n = 100_000
    one = sample_direction(1, rng, n)
    assert set(np.unique(one)) == {-1.0, 1.0}
    assert abs(one.mean()) < 3 / math.sqrt(n)
    two = sample_direction(2, rng, n)
    assert np.all(np.abs(two.mean(axis=0)) < 3 * np.sqrt(0.5 / n))
    three = sample_direction(3, rng, n)
    proj = np.abs(three[:, 0])
    # |theta . e1| is uniform on [0, 1] in d = 3
    assert abs(proj.mean() - 0.5) < 3 * math.sqrt(1 / 12 / n)
    assert sample_direction(4, rng).shape == (4,)
    with pytest.raises(ValueError):
        sample_direction(0, rng)


def test_compensator_symmetry():
    s = sample_stream(1.0, 1e-5, 2, 8)
    n = len(s)
    assert np.all(np.abs(s.theta.mean(axis=0)) < 5 * np.sqrt(0.5 / n))


def test_first_large_jump_time_examples():
    th = np.array([1.0])
    s = JumpStream.from_events([(0.7, th, 1.5), (0.4, th, 2.0), (0.2, th, 0.5)], 0.1, 1.0, 1)
    assert first_large_jump_time(s) == 0.4
    none = JumpStream.from_events([(0.2, th, 0.5)], 0.1, 1.0, 1)
    assert first_large_jump_time(none) is None


def test_first_large_jump_is_exponential():
    # atoms with r >= 1 form a rate-1 Poisson process, so tau is Exp(1) capped at T
    T = 2.0
    taus = []
    for s in derive_seeds(9, 3000):
        t = first_large_jump_time(sample_stream(T, 0.05, 1, s))
        taus.append(math.inf if t is None else t)
    taus = np.array(taus)
    assert abs(np.mean(np.isinf(taus)) - math.exp(-T)) < 5 * math.sqrt(0.13 * 0.87 / 3000)
    finite = taus[np.isfinite(taus)]
    cdf = lambda x: (1 - np.exp(-x)) / (1 - math.exp(-T))
    assert stats.kstest(finite, cdf).pvalue > 1e-3


def test_stream_validation():
    th = np.array([[1.0]])
    with pytest.raises(ValueError):
        JumpStream(np.array([0.5]), th, np.array([0.05]), 0.1, 1.0, 0, 1)
    with pytest.raises(ValueError):
        JumpStream(np.array([1.5]), th, np.array([0.5]), 0.1, 1.0, 0, 1)


def test_derive_seeds_are_stable_and_distinct():
    a = derive_seeds(123, 50)
    assert a == derive_seeds(123, 50)
    assert a[:10] == derive_seeds(123, 10)
    assert len(set(a)) == 50
    assert all(0 <= s < 2 ** 64 for s in a)
