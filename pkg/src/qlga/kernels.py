"""Hot inner loops: QLGA stepping, Markov stepping and running-average traces.

Every kernel exists twice, as an ``@njit`` loop and as a vectorised numpy
function with the same signature. The module-level names are bound to the
backend chosen by :func:`qlga._accel.requested_backend`; the explicit variants
stay reachable through :func:`get_kernels` for tests and benchmarks.

Amplitude arrays have shape ``(N, 2)``; column 0 is velocity -1, column 1 is
velocity +1. All kernels return new arrays except the ``acc`` accumulators,
which are updated in place.
"""

import numpy as np

from qlga._accel import njit, requested_backend

# -- numba ------------------------------------------------------------------


@njit(cache=True)
def _qlga_step_nb(amps, c, sn):
    n = amps.shape[0]
    out = np.empty_like(amps)
    isn = 1j * sn
    for x in range(n):
        # advect: left movers arrive from x+1, right movers from x-1
        a = amps[(x + 1) % n, 0]
        b = amps[(x - 1) % n, 1]
        out[x, 0] = c * a + isn * b
        out[x, 1] = isn * a + c * b
    return out


@njit(cache=True)
def _qlga_evolve_nb(amps, c, sn, t):
    cur = amps.copy()
    for _ in range(t):
        cur = _qlga_step_nb(cur, c, sn)
    return cur


@njit(cache=True)
def _qlga_prob_into_nb(amps, acc):
    for x in range(amps.shape[0]):
        a = amps[x, 0]
        b = amps[x, 1]
        acc[x] += a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag


@njit(cache=True)
def _qlga_accumulate_nb(amps, acc, c, sn, nsteps):
    cur = amps.copy()
    for _ in range(nsteps):
        _qlga_prob_into_nb(cur, acc)
        cur = _qlga_step_nb(cur, c, sn)
    return cur


@njit(cache=True)
def _tv_scaled_nb(acc, count, target):
    total = 0.0
    for x in range(acc.shape[0]):
        total += abs(acc[x] / count - target[x])
    return 0.5 * total


@njit(cache=True)
def _qlga_tv_trace_nb(amps, acc, c, sn, nsteps, t0, target):
    cur = amps.copy()
    tv = np.empty(nsteps)
    for k in range(nsteps):
        _qlga_prob_into_nb(cur, acc)
        tv[k] = _tv_scaled_nb(acc, t0 + k + 1, target)
        cur = _qlga_step_nb(cur, c, sn)
    return cur, tv


@njit(cache=True)
def _markov_step_nb(p):
    n = p.shape[0]
    out = np.empty_like(p)
    for x in range(n):
        out[x] = 0.5 * p[(x - 1) % n] + 0.5 * p[(x + 1) % n]
    return out


@njit(cache=True)
def _markov_evolve_nb(p, t):
    cur = p.copy()
    for _ in range(t):
        cur = _markov_step_nb(cur)
    return cur


@njit(cache=True)
def _markov_accumulate_nb(p, acc, nsteps):
    cur = p.copy()
    for _ in range(nsteps):
        for x in range(cur.shape[0]):
            acc[x] += cur[x]
        cur = _markov_step_nb(cur)
    return cur


@njit(cache=True)
def _markov_tv_trace_nb(p, acc, nsteps, t0, target):
    cur = p.copy()
    tv = np.empty(nsteps)
    for k in range(nsteps):
        for x in range(cur.shape[0]):
            acc[x] += cur[x]
        tv[k] = _tv_scaled_nb(acc, t0 + k + 1, target)
        cur = _markov_step_nb(cur)
    return cur, tv


# -- numpy ------------------------------------------------------------------


def _qlga_step_np(amps, c, sn):
    a = np.roll(amps[:, 0], -1)
    b = np.roll(amps[:, 1], 1)
    out = np.empty_like(amps)
    out[:, 0] = c * a + 1j * sn * b
    out[:, 1] = 1j * sn * a + c * b
    return out


def _qlga_evolve_np(amps, c, sn, t):
    cur = amps.copy()
    for _ in range(t):
        cur = _qlga_step_np(cur, c, sn)
    return cur


def _prob_np(amps):
    return (amps.real**2 + amps.imag**2).sum(axis=1)


def _qlga_accumulate_np(amps, acc, c, sn, nsteps):
    cur = amps.copy()
    for _ in range(nsteps):
        acc += _prob_np(cur)
        cur = _qlga_step_np(cur, c, sn)
    return cur


def _tv_scaled_np(acc, count, target):
    return 0.5 * np.abs(acc / count - target).sum()


def _qlga_tv_trace_np(amps, acc, c, sn, nsteps, t0, target):
    cur = amps.copy()
    tv = np.empty(nsteps)
    for k in range(nsteps):
        acc += _prob_np(cur)
        tv[k] = _tv_scaled_np(acc, t0 + k + 1, target)
        cur = _qlga_step_np(cur, c, sn)
    return cur, tv


def _markov_step_np(p):
    return 0.5 * np.roll(p, 1) + 0.5 * np.roll(p, -1)


def _markov_evolve_np(p, t):
    cur = p.copy()
    for _ in range(t):
        cur = _markov_step_np(cur)
    return cur


def _markov_accumulate_np(p, acc, nsteps):
    cur = p.copy()
    for _ in range(nsteps):
        acc += cur
        cur = _markov_step_np(cur)
    return cur


def _markov_tv_trace_np(p, acc, nsteps, t0, target):
    cur = p.copy()
    tv = np.empty(nsteps)
    for k in range(nsteps):
        acc += cur
        tv[k] = _tv_scaled_np(acc, t0 + k + 1, target)
        cur = _markov_step_np(cur)
    return cur, tv


_KERNELS = {
    "numba": {
        "qlga_step": _qlga_step_nb,
        "qlga_evolve": _qlga_evolve_nb,
        "qlga_accumulate": _qlga_accumulate_nb,
        "qlga_tv_trace": _qlga_tv_trace_nb,
        "markov_step": _markov_step_nb,
        "markov_evolve": _markov_evolve_nb,
        "markov_accumulate": _markov_accumulate_nb,
        "markov_tv_trace": _markov_tv_trace_nb,
    },
    "numpy": {
        "qlga_step": _qlga_step_np,
        "qlga_evolve": _qlga_evolve_np,
        "qlga_accumulate": _qlga_accumulate_np,
        "qlga_tv_trace": _qlga_tv_trace_np,
        "markov_step": _markov_step_np,
        "markov_evolve": _markov_evolve_np,
        "markov_accumulate": _markov_accumulate_np,
        "markov_tv_trace": _markov_tv_trace_np,
    },
}


def get_kernels(backend):
    """Return the kernel table for ``"numba"`` or ``"numpy"``."""
    try:
        return _KERNELS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}") from None


BACKEND = requested_backend()
_active = get_kernels(BACKEND)

qlga_step = _active["qlga_step"]
qlga_evolve = _active["qlga_evolve"]
qlga_accumulate = _active["qlga_accumulate"]
qlga_tv_trace = _active["qlga_tv_trace"]
markov_step = _active["markov_step"]
markov_evolve = _active["markov_evolve"]
markov_accumulate = _active["markov_accumulate"]
markov_tv_trace = _active["markov_tv_trace"]
