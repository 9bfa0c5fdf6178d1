"""Timing comparison of the jitted and pure-numpy grid kernels.

Runs each kernel on figure-sized workloads with both backends and prints a
table of best-of-repeats wall times plus the agreement between the outputs.
The numba warmup (first call compiles) is excluded from the timings.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from tpgsim import kernels


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _workloads():
    rng = np.random.default_rng(11)
    xs = np.linspace(-7.0, 7.0, 561)
    r2 = (rng.random(121 * 121) * 24.5).astype(np.float64)
    grid = np.linspace(-3.5, 3.5, 121)
    alphas = ((grid[:, None] + 1j * grid[None, :]) / np.sqrt(2.0)).ravel()
    return [
        ("hermite_table 561x96", lambda b: b.hermite_table(xs, 96)),
        ("laguerre_wigner_table 14641x48",
         lambda b: b.laguerre_wigner_table(r2, 48)),
        ("displaced_parity_stack 1024x48",
         lambda b: b.displaced_parity_stack(alphas[:1024], 48)),
        ("displaced_parity_stack 81x192",
         lambda b: b.displaced_parity_stack(alphas[:81], 192)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    names = kernels.available_backends()
    impls = {n: kernels.get_backend(n) for n in names}
    print("backends:", ", ".join(names))
    if "numba" not in impls:
        print("numba backend not importable; timing numpy only")

    header = "%-34s" % "kernel" + "".join("%12s" % n for n in names)
    if len(names) == 2:
        header += "%10s %12s" % ("speedup", "max diff")
    print(header)
    print("-" * len(header))
    for label, run in _workloads():
        times = {}
        outs = {}
        for n, impl in impls.items():
            run(impl)  # warmup / JIT compile
            times[n] = _time(lambda: run(impl), args.repeats)
            outs[n] = run(impl)
        row = "%-34s" % label + "".join("%10.1f ms" % (times[n] * 1e3)
                                        for n in names)
        if len(names) == 2:
            a, b = (outs[n] for n in names)
            diff = np.abs(np.asarray(a) - np.asarray(b)).max()
            row += "%9.1fx %12.1e" % (times["numpy"] / times["numba"], diff)
        print(row)


if __name__ == "__main__":
    main()
