"""Classical comparator: the unbiased, non-lazy random walk on the N-cycle.

Distributions are plain float arrays over sites. Trajectories draw their coin
flips from numpy's ``PCG64`` generator (``np.random.default_rng(seed)``), one
generator per trajectory, so results depend only on the seed.
"""

from dataclasses import dataclass

import numpy as np

from qlga import kernels
from qlga.lgastate import check_lattice_size

MASS_TOL = 1e-10


def check_distribution(p, tol=MASS_TOL):
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError("distribution must be one-dimensional")
    check_lattice_size(p.size)
    if np.any(p < 0):
        raise ValueError("distribution has negative entries")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"distribution sums to {p.sum()!r}, not 1")
    return p


def delta(N, x0=0):
    N = check_lattice_size(N)
    if not 0 <= x0 < N:
        raise ValueError(f"x0 must lie in 0..{N - 1}, got {x0!r}")
    p = np.zeros(N)
    p[x0] = 1.0
    return p


def uniform(N):
    N = check_lattice_size(N)
    return np.full(N, 1.0 / N)


def markov_step(d):
    """prob(x; t+1) = (prob(x-1; t) + prob(x+1; t)) / 2 with periodic indices."""
    return kernels.markov_step(check_distribution(d))


def markov_evolve(d, t):
    if t < 0 or int(t) != t:
        raise ValueError(f"t must be a nonnegative integer, got {t!r}")
    d = check_distribution(d)
    return kernels.markov_evolve(d, int(t))


def time_average_markov(d0, T):
    """Mean of ``markov_evolve(d0, t)`` over ``t = 0..T-1``."""
    if T < 1 or int(T) != T:
        raise ValueError(f"T must be a positive integer, got {T!r}")
    d0 = check_distribution(d0)
    acc = np.zeros_like(d0)
    kernels.markov_accumulate(d0, acc, int(T))
    return acc / T


@dataclass(frozen=True)
class WalkerTrajectory:
    positions: np.ndarray
    seed: int
    N: int


def sample_trajectory(N, x0, t, seed):
    """One run of the walk: ``t`` fair coin flips starting from ``x0``."""
    N = check_lattice_size(N)
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    rng = np.random.default_rng(seed)
    steps = 2 * rng.integers(0, 2, size=int(t)) - 1
    positions = np.empty(int(t) + 1, dtype=np.int64)
    positions[0] = x0
    positions[1:] = x0 + np.cumsum(steps)
    return WalkerTrajectory(np.mod(positions, N), seed, N)


def endpoint_histogram(N, x0, t, seeds):
    """Empirical distribution of final positions over the given seeds."""
    counts = np.zeros(N)
    seeds = list(seeds)
    for seed in seeds:
        counts[sample_trajectory(N, x0, t, seed).positions[-1]] += 1
    return counts / len(seeds)
