"""Benchmark the compiled kernels against the NumPy fallback.

Run after building the extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

import tamecert._kernels as K
from tamecert.exactarith import GOLDEN
from tamecert.systems import CutProjectCoding, full_shift_word


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads():
    cantor = CutProjectCoding(GOLDEN, cantor_generation=6).word(100_000).astype(np.int64)
    full16 = full_shift_word(16).astype(np.int64)
    factors16 = K.extract_factors(full16, 16)
    positions = np.asarray([0, 3, 5, 8, 11, 15], dtype=np.int64)
    rng = np.random.RandomState(0)
    values = np.sort(rng.rand(10_000))
    images = rng.rand(10_000, 25)
    weights = 0.5 ** np.abs(np.arange(25, dtype=float) - 12)
    return [
        ("extract_factors (1e5 word, L=20)", lambda m: m.extract_factors(cantor, 20)),
        ("distinct_projection_count (65k factors)",
         lambda m: m.distinct_projection_count(factors16, positions)),
        ("window_oscillation (1e4 x 25, r=0.002)",
         lambda m: m.window_oscillation(values, 0.002, images, weights)),
    ]


def main():
    backends = K.backends()
    print(f"active backend: {K.BACKEND}; available: {', '.join(backends)}")
    rows = []
    for name, call in workloads():
        times = {b: timeit(lambda m=mod: call(m)) for b, mod in backends.items()}
        rows.append((name, times))
    width = max(len(r[0]) for r in rows)
    header = f"{'kernel':<{width}}  " + "  ".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"  {'speedup':>8}"
    print(header)
    for name, times in rows:
        line = f"{name:<{width}}  " + "  ".join(f"{times[b] * 1e3:>10.2f}ms" for b in backends)
        if len(times) == 2:
            fallback, fast = times["fallback"], times.get("speedups", times["fallback"])
            line += f"  {fallback / fast:>7.1f}x"
        print(line)


if __name__ == "__main__":
    main()
