"""Compare the compiled kernel extension against the pure numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from ikemo import _kernels_py as pure

try:
    from ikemo import _kernels_c as compiled
except ImportError:
    compiled = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(repeats):
    rng = np.random.default_rng(0)
    rows = []

    for n in (80, 200, 400):
        F = rng.random((n, 2))
        CV = np.where(rng.random(n) < 0.3, rng.random(n), 0.0)
        rows.append((f"nondominated_ranks n={n}",
                     lambda F=F, CV=CV: pure.nondominated_ranks(F, CV),
                     (lambda F=F, CV=CV: compiled.nondominated_ranks(F, CV))
                     if compiled else None))

    k = 200
    Ff = rng.random((k, 2))
    orders = np.argsort(Ff, axis=0, kind="stable")
    rows.append((f"crowding k={k}",
                 lambda: pure.crowding_from_orders(Ff, orders),
                 (lambda: compiled.crowding_from_orders(Ff, orders)) if compiled else None))

    q, d = 100, 78
    p1, p2 = rng.random((2, q, d))
    lo, hi = np.zeros(d), np.ones(d)
    pu = rng.random(q)
    ug, ub, us = rng.random((3, q, d))
    rows.append((f"sbx_pairs {q}x{d}",
                 lambda: pure.sbx_pairs(p1, p2, lo, hi, 30.0, 0.9, pu, ug, ub, us),
                 (lambda: compiled.sbx_pairs(p1, p2, lo, hi, 30.0, 0.9,
                                             pu, ug, ub, us)) if compiled else None))

    ua, ud_ = rng.random((2, q, d))
    rows.append((f"polynomial_mutation {q}x{d}",
                 lambda: pure.polynomial_mutation(p1, lo, hi, 50.0, 1 / d, ua, ud_),
                 (lambda: compiled.polynomial_mutation(p1, lo, hi, 50.0, 1 / d,
                                                       ua, ud_)) if compiled else None))

    print(f"{'kernel':34} {'pure (ms)':>10} {'compiled (ms)':>14} {'speedup':>8}")
    for name, pure_fn, compiled_fn in rows:
        t_pure = timeit(pure_fn, repeats) * 1e3
        if compiled_fn is None:
            print(f"{name:34} {t_pure:10.3f} {'n/a':>14} {'n/a':>8}")
            continue
        t_comp = timeit(compiled_fn, repeats) * 1e3
        print(f"{name:34} {t_pure:10.3f} {t_comp:14.3f} {t_pure / t_comp:7.1f}x")

    if compiled is not None:
        a = pure.nondominated_ranks(rng.random((120, 2)), np.zeros(120))
        b = compiled.nondominated_ranks(rng.random((120, 2)), np.zeros(120))
        print(f"\nbackends loaded: pure + compiled "
              f"(results cross-checked in tests/test_kernels.py)")
    else:
        print("\ncompiled extension not built; only the pure backend was timed")


if __name__ == "__main__":
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    bench(parser.parse_args().repeats)
