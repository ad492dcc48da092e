"""Benchmark the numba kernels against the pure-numpy fallback.

Both backends live side by side in prc._kernels.IMPLEMENTATIONS, so this
script times them on the same inputs: term combination, batched row products
and the bucketed convolution kernel, plus one end-to-end truncated series
product through whichever backend PRC_KERNELS selected at import time.

Usage:
    python benchmarks/bench_kernels.py [--rows 200000] [--width 4] [--repeat 5]
"""

import argparse
import time

import numpy as np

from prc._kernels import BACKEND, IMPLEMENTATIONS, PAD_VAR


def make_terms(rng, rows, width, p, nvars=8, max_exp=6):
    """Random padded term rows with coefficients in [1, p)."""
    tv = np.full((rows, width), PAD_VAR, dtype=np.int64)
    te = np.zeros((rows, width), dtype=np.int64)
    for i in range(rows):
        used = rng.choice(nvars, size=rng.integers(1, width + 1), replace=False)
        used.sort()
        for k, v in enumerate(used):
            tv[i, k] = v
            te[i, k] = rng.integers(1, max_exp + 1)
    coeffs = rng.integers(1, p, size=rows).astype(np.int64)
    return tv, te, coeffs


def bench(fn, args, repeat):
    fn(*args)  # warm-up (includes JIT compilation for the numba backend)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--width", type=int, default=4)
    parser.add_argument("--pairs", type=int, default=400_000)
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--p", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if "numba" not in IMPLEMENTATIONS:
        raise SystemExit("numba backend unavailable; nothing to compare")

    rng = np.random.default_rng(args.seed)
    p = args.p
    tv, te, c = make_terms(rng, args.rows, args.width, p)
    tvb, teb, cb = make_terms(rng, args.rows // 4 + 1, args.width, p)
    ia = rng.integers(0, args.rows, size=args.pairs)
    ib = rng.integers(0, tvb.shape[0], size=args.pairs)
    n_buckets = 512
    outj = np.sort(rng.integers(0, n_buckets, size=args.rows))

    cases = [
        ("combine", "combine", (tv, te, c, p)),
        ("mul_pairs", "mul_pairs", (tv, te, c, ia, tvb, teb, cb, ib, p)),
        ("convolve", "convolve", (tv, te, c, outj, n_buckets, p)),
    ]

    print(f"rows={args.rows} width={args.width} pairs={args.pairs} p={p}")
    print(f"{'kernel':<12} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for label, key, case_args in cases:
        t_np = bench(IMPLEMENTATIONS["numpy"][key], case_args, args.repeat)
        t_nb = bench(IMPLEMENTATIONS["numba"][key], case_args, args.repeat)
        print(f"{label:<12} {t_np * 1e3:>8.2f}ms {t_nb * 1e3:>8.2f}ms {t_np / t_nb:>8.2f}x")

    # End-to-end: one truncated series product through the active backend.
    from prc.field_tower import FieldElem, t
    from prc.series import Series

    prec = 96
    coeffs = [
        FieldElem.variable(int(i) % 6, p, exp=int(i) % 4 + 1) for i in range(prec)
    ]
    s = Series(coeffs, p=p, precision=prec)
    big = (s * s) * (s * s)
    t0 = time.perf_counter()
    big * big
    dt = time.perf_counter() - t0
    print(f"series product (backend={BACKEND}, N={prec}): {dt * 1e3:.1f}ms")


if __name__ == "__main__":
    main()
