"""Compare the compiled kernel backend against the pure-Python fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--n 20000] [--d 40] [--repeats 5]

Both backends are imported directly (the compiled one only if it built), so
a single process benchmarks the pair without re-importing the package.
"""

import argparse
import time

import numpy as np

from fairdbg._kernels import py_kernels

try:
    from fairdbg._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def make_cases(n, d, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = (rng.random(n) > 0.5).astype(float)
    ysvm = np.where(y > 0.5, 1.0, -1.0)
    w = rng.normal(size=d)
    values = rng.normal(size=n)
    labels = y.copy()
    return {
        "sigmoid": lambda k: k.sigmoid(X @ w),
        "logreg_loss": lambda k: k.logreg_loss(X, y, w, 0.1, 0.01),
        "logreg_grad": lambda k: k.logreg_grad(X, y, w, 0.1, 0.01),
        "linsvm_loss": lambda k: k.linsvm_loss(X, ysvm, w, 0.1, 0.01),
        "linsvm_grad": lambda k: k.linsvm_grad(X, ysvm, w, 0.1, 0.01),
        "gini_split_scan": lambda k: k.gini_split_scan(values, labels),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=20000, help="rows")
    parser.add_argument("--d", type=int, default=40, help="features")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    cases = make_cases(args.n, args.d)
    print(f"n={args.n} d={args.d} repeats={args.repeats} (best-of)")
    header = f"{'kernel':<18}{'python (ms)':>14}{'cython (ms)':>14}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, call in cases.items():
        t_py = _time(lambda: call(py_kernels), args.repeats) * 1e3
        if _fast is None:
            print(f"{name:<18}{t_py:>14.3f}{'n/a':>14}{'n/a':>10}")
            continue
        t_cy = _time(lambda: call(_fast), args.repeats) * 1e3
        print(f"{name:<18}{t_py:>14.3f}{t_cy:>14.3f}{t_py / t_cy:>9.2f}x")
    if _fast is None:
        print("\ncompiled backend not built; showing fallback timings only")


if __name__ == "__main__":
    main()
