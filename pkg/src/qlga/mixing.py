"""Distribution analytics: TV distance, Cesaro averages, mixing times, scaling fits.

Mixing time here is the smallest horizon ``T`` at which the running average
``(1/T) sum_{t<T} P_t`` is within ``epsilon`` total variation of uniform.
Neither the quantum ``P_t`` nor the non-lazy walk on an even cycle converges
pointwise, so both systems are compared through their running averages.

Default experiments use odd lattice sizes, for which the quantum average
tends to uniform; circuit work uses powers of two. The grids are disjoint.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from qlga import kernels
from qlga.lgastate import QlgaState, check_lattice_size, make_initial
from qlga.walkbench import check_distribution, delta

DENSE_LIMIT = 1000
GRID_RATIO = 1.1
DEFAULT_EPSILON = 0.05


def default_t_max(N):
    return 50 * N * N


def tv_distance(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"size mismatch: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())


def time_averaged_distribution(state0, s, T):
    """Running average of the position distribution over ``t = 0..T-1``.

    One forward pass; each ``P_t`` is added as the state is stepped.
    """
    if T < 1 or int(T) != T:
        raise ValueError(f"T must be a positive integer, got {T!r}")
    acc = np.zeros(state0.N)
    kernels.qlga_accumulate(state0.amplitudes, acc, np.cos(s), np.sin(s), int(T))
    return acc / T


def search_schedule(t_max, dense_limit=DENSE_LIMIT, ratio=GRID_RATIO):
    """Checkpoints beyond the dense region: geometric, ending exactly at ``t_max``."""
    grid = []
    g = dense_limit
    while g < t_max:
        g = min(t_max, max(g + 1, math.ceil(g * ratio)))
        grid.append(g)
    return grid


@dataclass
class MixingReport:
    N: int
    epsilon: float
    t_mix: int | None
    t_max: int
    system: str
    s: float | None = None
    init: str = "symmetric"
    tv: float = float("nan")

    @property
    def found(self):
        return self.t_mix is not None

    def to_dict(self):
        return asdict(self)


def _first_crossing(start, accumulate, trace, target, epsilon, t_max):
    """Smallest T <= t_max with TV(avg_T, target) <= epsilon on the schedule.

    Every T up to ``DENSE_LIMIT`` is checked; then checkpoints grow by
    ``GRID_RATIO`` and the first passing interval is bisected, re-running the
    interval from a snapshot. Returns ``(T, tv)`` or ``(None, tv_at_t_max)``.
    """
    acc = np.zeros(target.size)
    n_dense = min(DENSE_LIMIT, t_max)
    state, tv = trace(start, acc, n_dense, 0, target)
    hits = np.flatnonzero(tv <= epsilon)
    if hits.size:
        return int(hits[0]) + 1, float(tv[hits[0]])
    last_t, last_tv = n_dense, float(tv[-1])
    for g in search_schedule(t_max):
        snap_state, snap_acc = state.copy(), acc.copy()
        state = accumulate(state, acc, g - last_t)
        g_tv = 0.5 * float(np.abs(acc / g - target).sum())
        if g_tv <= epsilon:
            _, interval = trace(snap_state, snap_acc, g - last_t, last_t, target)
            lo, hi = last_t, g
            while hi - lo > 1:
                mid = (lo + hi) // 2
                if interval[mid - last_t - 1] <= epsilon:
                    hi = mid
                else:
                    lo = mid
            return hi, float(interval[hi - last_t - 1])
        last_t, last_tv = g, g_tv
    return None, last_tv


def _check_epsilon(epsilon):
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon!r}")


def quantum_mixing_time(N, s=math.pi / 4, init="symmetric", epsilon=DEFAULT_EPSILON, t_max=None):
    """Mixing time of the QLGA running average towards uniform.

    ``init`` is a kind accepted by :func:`make_initial` (placed at x0 = 0) or
    a ready :class:`QlgaState`.
    """
    _check_epsilon(epsilon)
    if isinstance(init, QlgaState):
        state0, label = init, "custom"
    else:
        state0, label = make_initial(N, init), init
    N = state0.N
    t_max = default_t_max(N) if t_max is None else int(t_max)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    c, sn = np.cos(s), np.sin(s)
    target = np.full(N, 1.0 / N)

    def accumulate(amps, acc, n):
        return kernels.qlga_accumulate(amps, acc, c, sn, n)

    def trace(amps, acc, n, t0, tgt):
        return kernels.qlga_tv_trace(amps, acc, c, sn, n, t0, tgt)

    t_mix, tv = _first_crossing(state0.amplitudes, accumulate, trace, target, epsilon, t_max)
    return MixingReport(N, epsilon, t_mix, t_max, "quantum", float(s), label, tv)


def classical_mixing_time(N, x0=0, epsilon=DEFAULT_EPSILON, t_max=None, start=None):
    """Mixing time of the random walk's running average towards uniform.

    Starts from a point mass at ``x0`` unless ``start`` gives a distribution.
    """
    _check_epsilon(epsilon)
    N = check_lattice_size(N)
    if start is None:
        d0, label = delta(N, x0), "delta"
    else:
        d0, label = check_distribution(start), "custom"
    t_max = default_t_max(N) if t_max is None else int(t_max)
    if t_max < 1:
        raise ValueError("t_max must be >= 1")
    target = np.full(N, 1.0 / N)
    t_mix, tv = _first_crossing(
        d0, kernels.markov_accumulate, kernels.markov_tv_trace, target, epsilon, t_max
    )
    return MixingReport(N, epsilon, t_mix, t_max, "classical", None, label, tv)


@dataclass
class ScalingFit:
    points: list = field(default_factory=list)
    slope: float = float("nan")
    intercept: float = float("nan")
    r2: float = float("nan")

    def to_dict(self):
        return {
            "points": [[int(n), int(t)] if float(t).is_integer() else [n, t] for n, t in self.points],
            "slope": self.slope,
            "intercept": self.intercept,
            "r2": self.r2,
        }


def scaling_fit(points):
    """Least squares of log T on log N; returns slope, intercept and r^2."""
    points = [(float(n), float(t)) for n, t in points]
    if len(points) < 3:
        raise ValueError("scaling fit needs at least 3 points")
    if any(n <= 0 or t <= 0 for n, t in points):
        raise ValueError("scaling fit needs positive points")
    x = np.log([n for n, _ in points])
    y = np.log([t for _, t in points])
    A = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - np.sum(resid**2) / ss_tot
    return ScalingFit(points, float(slope), float(intercept), float(min(1.0, max(0.0, r2))))


def _sweep_job(args):
    system, N, kwargs = args
    if system == "quantum":
        return quantum_mixing_time(N, **kwargs)
    return classical_mixing_time(N, **kwargs)


def mixing_sweep(Ns, system, jobs=1, **kwargs):
    """Mixing reports for each N; order and values do not depend on ``jobs``."""
    if system not in ("quantum", "classical"):
        raise ValueError(f"unknown system {system!r}")
    work = [(system, int(N), kwargs) for N in Ns]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_sweep_job, work))
    return [_sweep_job(w) for w in work]


def fit_reports(reports):
    return scaling_fit([(r.N, r.t_mix) for r in reports if r.t_mix is not None])


__all__ = [
    "MixingReport",
    "ScalingFit",
    "classical_mixing_time",
    "fit_reports",
    "mixing_sweep",
    "quantum_mixing_time",
    "scaling_fit",
    "search_schedule",
    "time_averaged_distribution",
    "tv_distance",
]
