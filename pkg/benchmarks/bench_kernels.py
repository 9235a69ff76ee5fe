"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both tables come from the same process; the numba path is warmed up first
so compile time is excluded.
"""

import argparse
import time

import numpy as np

from qlga.kernels import get_kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    for N, steps in ((17, 10_000), (257, 5_000), (1024, 2_000), (8192, 200)):
        amps = rng.normal(size=(N, 2)) + 1j * rng.normal(size=(N, 2))
        amps /= np.linalg.norm(amps)
        p = np.full(N, 1.0 / N)
        target = np.full(N, 1.0 / N)
        c, sn = np.cos(np.pi / 4), np.sin(np.pi / 4)
        yield f"qlga_evolve      N={N:<5} t={steps}", lambda k, a=amps, s=steps: k["qlga_evolve"](a, c, sn, s)
        yield (
            f"qlga_tv_trace    N={N:<5} t={steps}",
            lambda k, a=amps, s=steps, tg=target, n=N: k["qlga_tv_trace"](a, np.zeros(n), c, sn, s, 0, tg),
        )
        yield f"markov_evolve    N={N:<5} t={steps}", lambda k, q=p, s=steps: k["markov_evolve"](q, s)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    nb, npk = get_kernels("numba"), get_kernels("numpy")
    print(f"{'kernel':<36}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for label, fn in cases():
        fn(nb)  # compile
        t_nb = best_of(lambda: fn(nb), args.repeat)
        t_np = best_of(lambda: fn(npk), max(1, args.repeat // 2))
        print(f"{label:<36}{t_nb * 1e3:>12.2f}{t_np * 1e3:>12.2f}{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
