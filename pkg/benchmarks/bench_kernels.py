"""Benchmark the delay recursion: compiled extension vs NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--samples N] [--repeats K]

Reports steps/s for each available backend on identical inputs, the
speedup, and the worst relative deviation between their outputs (expected
at the rounding level; the vectorized NumPy path fuses multiply-adds
internally, so the two backends differ by about one ulp).
"""
import argparse
import time

import numpy as np

from membrane_etalon import _kernels_py

try:
    from membrane_etalon import _kernels as _compiled
except ImportError:
    _compiled = None


def _inputs(samples, delay, seed=0):
    rng = np.random.default_rng(seed)
    drive = np.full(samples, 1.0 + 0.0j)
    phi = 1e-3 * np.sin(2 * np.pi * np.arange(samples) / 977.0)
    phase = np.exp(-1j * phi)
    t1 = complex(np.sqrt(1 - 0.3618), 0.0)
    mu = 0.3618 * np.exp(1j * 0.02 * rng.random())
    return drive, phase, t1, mu, delay


def _time(impl, args, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        start = time.perf_counter()
        out = impl.delay_recursion(*args)
        best = min(best, time.perf_counter() - start)
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--delay", type=int, default=64)
    opts = parser.parse_args()

    args = _inputs(opts.samples, opts.delay)
    rows = []
    t_py, out_py = _time(_kernels_py, args, opts.repeats)
    rows.append(("numpy", t_py, out_py))
    if _compiled is not None:
        t_c, out_c = _time(_compiled, args, opts.repeats)
        rows.append(("compiled", t_c, out_c))

    print(f"delay recursion, {opts.samples:,} samples, delay {opts.delay}, "
          f"best of {opts.repeats}")
    for name, t, _ in rows:
        print(f"  {name:9s} {opts.samples / t / 1e6:8.1f} M steps/s   "
              f"({t * 1e3:7.2f} ms)")
    if _compiled is None:
        print("  compiled extension not built; only the fallback was timed")
        return
    print(f"  speedup   {t_py / t_c:8.1f} x")
    scale = np.max(np.abs(out_py))
    dev = np.max(np.abs(rows[0][2] - rows[1][2])) / scale
    print(f"  outputs agree to {dev:.2e} (relative)")


if __name__ == "__main__":
    main()
