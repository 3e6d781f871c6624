#!/usr/bin/env python3
"""Compare the compiled kernels against their pure-numpy fallbacks.

Each hot kernel runs on identical inputs in both variants; the table
reports best-of-N wall time per call, the speedup, and the largest
observed discrepancy between the two results.  Both variant families
are invoked directly, so the comparison works regardless of the
SHIFTSUM_NUMBA setting (the numba column is skipped only when numba is
not importable at all).

Usage:
    python3 bench/bench_kernels.py [--repeat 3] [--threads 8] [--seed 0]
"""

import argparse
import time

import numpy as np

from shiftsum import kernels


def best_time(fn, args, repeat):
    fn(*args)  # warmup; includes JIT compilation for the compiled variant
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def discrepancy(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def build_cases(rng):
    X, H = 1 << 16, 128
    f = rng.standard_normal(2 * X + H + 1)
    g = rng.standard_normal(2 * X + H + 1)
    M, U, k = 1 << 17, 42, 3
    vals = rng.standard_normal(2 * M + U + 1)
    ang = 2.0 * np.pi * np.arange(k) / k
    cosv, sinv = np.cos(ang), np.sin(ang)
    big = rng.standard_normal((1 << 20) + 2)
    return [
        ("shifted_dot", (big, big, 1, (1 << 20) - 1, 1), "n=2^20"),
        ("shifted_dots", (f, g, X, H), "X=2^16 H=128"),
        ("window_square_sum", (f, X, 2 * X, 64), "X=2^16 a=64"),
        ("phased_windows_fixed", (vals, cosv, sinv, M, U), "M=2^17 U=42 k=3"),
        ("phased_windows_max", (vals, cosv, sinv, M, U), "M=2^17 U=42 k=3"),
        ("exp_sum_pair", (big, 1 << 17, 1 << 18, 0.1234), "len=2^17"),
        ("divisor_sieve", (1 << 18,), "n=2^18"),
    ]


def main():
    ap = argparse.ArgumentParser(
        description="benchmark compiled kernels against numpy fallbacks")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timed calls per variant (best is reported)")
    ap.add_argument("--threads", type=int, default=8,
                    help="worker threads for the compiled variants")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    have_nb = kernels.NUMBA_AVAILABLE
    eff = 0
    if have_nb:
        import numba

        eff = min(args.threads, numba.config.NUMBA_NUM_THREADS)
        numba.set_num_threads(eff)

    print(f"dispatch backend: {kernels.BACKEND}   "
          f"numba importable: {have_nb}   threads: {eff or 'n/a'}   "
          f"repeat: {args.repeat}")
    if not have_nb:
        print("numba is not importable; timing the numpy fallbacks only.")
    header = (f"{'kernel':<22}{'size':<18}{'numpy':>12}{'numba':>12}"
              f"{'speedup':>9}{'max|diff|':>12}")
    print(header)
    print("-" * len(header))

    rng = np.random.default_rng(args.seed)
    for name, fargs, size in build_cases(rng):
        fn_np = getattr(kernels, name + "_np")
        t_np = best_time(fn_np, fargs, args.repeat)
        if have_nb:
            fn_nb = getattr(kernels, name + "_nb")
            t_nb = best_time(fn_nb, fargs, args.repeat)
            diff = discrepancy(fn_np(*fargs), fn_nb(*fargs))
            print(f"{name:<22}{size:<18}{t_np * 1e3:>9.2f} ms"
                  f"{t_nb * 1e3:>9.2f} ms{t_np / t_nb:>8.1f}x{diff:>12.2e}")
        else:
            print(f"{name:<22}{size:<18}{t_np * 1e3:>9.2f} ms"
                  f"{'—':>12}{'—':>9}{'—':>12}")


if __name__ == "__main__":
    main()
