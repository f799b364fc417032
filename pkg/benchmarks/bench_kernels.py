"""Compare the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 2048] [--repeats 3]

Prints one row per kernel with the best wall time of each backend and the
speedup, after checking that both backends return the same answer.
"""
import argparse
import time

import numpy as np

from edindex import kernels


def _best(fn, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return out, best


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    if a is None or b is None:
        return a is b
    return np.array_equal(np.asarray(a), np.asarray(b))


def cases(n, rng):
    a = rng.integers(0, 4, n)
    b = a.copy()
    b[rng.choice(n, n // 10, replace=False)] = rng.integers(0, 4, n // 10)
    small = n // 4

    unit = 16
    units = -(-n // unit)
    ptr = np.arange(units + 1) * 3
    idx = np.clip(np.repeat(np.arange(units), 3) + np.tile([-1, 0, 1], units), 0, units - 1)
    keys_s = rng.integers(0, 64, n)
    keys_t = keys_s.copy()

    left = np.sort(rng.integers(0, n, 4 * n))
    right = rng.integers(0, n, 4 * n)
    order = np.lexsort((-right, left))

    sync = rng.integers(0, 512, max(small // 2, 8))
    cb = rng.integers(0, 8, (64, 16))
    cand = np.arange(64)
    recv = rng.integers(0, 8, 16)
    return {
        "lcs_length": lambda: kernels.lcs_length(a, b),
        "ed_distance": lambda: kernels.ed_distance(a, b),
        "ed_align": lambda: kernels.ed_align(a[:small], b[:small]),
        "ed_banded": lambda: kernels.ed_banded(a, b, 64),
        "lis_matching": lambda: kernels.lis_matching(left[order], right[order], n),
        "build_edges": lambda: kernels.build_edges(keys_s, keys_t, unit, unit, ptr, idx),
        "lcs_many": lambda: kernels.lcs_many(cb, cand, recv),
        "sync_scan": lambda: kernels.sync_scan(sync, 0.5, 2),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels are not built; only the python backend is available")
    print(f"{'kernel':<14}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}  agree")
    # the closures look the kernels up at call time, so `using` switches them
    for name, fn in cases(args.n, np.random.default_rng(args.seed)).items():
        times, outs = {}, {}
        for b in backends:
            with kernels.using(b):
                outs[b], times[b] = _best(fn, args.repeats)
        agree = all(_same(outs[backends[0]], outs[b]) for b in backends)
        speed = times["python"] / times["compiled"] if "compiled" in times and times["compiled"] else float("nan")
        print(f"{name:<14}" + "".join(f"{times[b]:>11.4f}s" for b in backends) + f"{speed:>9.1f}x  {agree}")


if __name__ == "__main__":
    main()
