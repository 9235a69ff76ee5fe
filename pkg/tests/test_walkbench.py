from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlga import walkbench as W
from qlga.mixing import tv_distance


def binomial_oracle(N, x0, t):
    """Fold the free-line binomial law of a t-step walk onto the N-cycle."""
    p = np.zeros(N)
    for k in range(t + 1):
        p[(x0 + 2 * k - t) % N] += comb(t, k) / 2**t
    return p


def test_one_step():
    np.testing.assert_array_equal(W.markov_step(W.delta(4, 0)), [0, 0.5, 0, 0.5])


def test_uniform_fixed():
    np.testing.assert_array_equal(W.markov_step(W.uniform(7)), W.uniform(7))


def test_two_steps():
    p = W.markov_evolve(W.delta(8, 0), 2)
    np.testing.assert_array_equal(p, [0.5, 0, 0.25, 0, 0, 0, 0.25, 0])


@pytest.mark.parametrize("N,t", [(8, 4), (8, 13), (5, 9), (16, 40)])
def test_matches_binomial_oracle(N, t):
    np.testing.assert_allclose(W.markov_evolve(W.delta(N, 2 % N), t), binomial_oracle(N, 2 % N, t), atol=1e-15)


def test_zero_steps():
    p = W.delta(5, 3)
    np.testing.assert_array_equal(W.markov_evolve(p, 0), p)


def test_rejects_bad_distribution():
    with pytest.raises(ValueError):
        W.markov_step([0.5, 0.6])
    with pytest.raises(ValueError):
        W.markov_step([1.5, -0.5])


def test_odd_cycle_time_average_tends_to_uniform():
    avg = W.time_average_markov(W.delta(9, 0), 20_000)
    assert tv_distance(avg, W.uniform(9)) < 0.01


class TestTimeAverage:
    def test_T1(self):
        p = W.delta(6, 2)
        np.testing.assert_array_equal(W.time_average_markov(p, 1), p)

    def test_uniform(self):
        np.testing.assert_allclose(W.time_average_markov(W.uniform(5), 17), W.uniform(5), atol=1e-15)

    def test_two_terms(self):
        np.testing.assert_allclose(W.time_average_markov(W.delta(4, 0), 2), [0.5, 0.25, 0, 0.25])

    def test_rejects_T0(self):
        with pytest.raises(ValueError):
            W.time_average_markov(W.delta(4, 0), 0)


@given(N=st.integers(2, 30), x0=st.integers(0, 29), t=st.integers(0, 80))
@settings(max_examples=60, deadline=None)
def test_invariants(N, x0, t):
    x0 %= N
    p = W.markov_evolve(W.delta(N, x0), t)
    assert abs(p.sum() - 1) <= 1e-12
    assert np.all(p >= 0)
    d = np.arange(N)
    np.testing.assert_array_equal(p[(x0 + d) % N], p[(x0 - d) % N])
    if N % 2 == 0:
        off_parity = (d - x0 - t) % 2 != 0
        assert np.all(p[off_parity] == 0)


class TestTrajectory:
    def test_t0(self):
        tr = W.sample_trajectory(10, 4, 0, seed=1)
        np.testing.assert_array_equal(tr.positions, [4])

    def test_deterministic(self):
        a = W.sample_trajectory(10, 4, 100, seed=7).positions
        b = W.sample_trajectory(10, 4, 100, seed=7).positions
        np.testing.assert_array_equal(a, b)

    def test_unit_steps(self):
        pos = W.sample_trajectory(6, 0, 500, seed=3).positions
        diffs = np.mod(np.diff(pos), 6)
        assert set(diffs.tolist()) <= {1, 5}

    def test_histogram_matches_markov(self):
        hist = W.endpoint_histogram(16, 0, 256, range(10_000))
        exact = W.markov_evolve(W.delta(16, 0), 256)
        assert tv_distance(hist, exact) <= 0.02
