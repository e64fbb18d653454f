"""Compare the compiled and pure-numpy Hermite series kernels.

Reports nanoseconds per (node, degree) step and the relative difference of
the series value between backends.

    python benchmarks/bench_kernels.py --log2n 8 10 --m 20000
"""
import argparse
import importlib
import time

import numpy as np

from hermite_qmc import _kernels_py, build_rule


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--log2n", type=int, nargs="+", default=[8, 10, 12])
    ap.add_argument("--m", type=int, default=20000, help="series truncation")
    ap.add_argument("--alpha", type=int, default=2)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    try:
        compiled = importlib.import_module("hermite_qmc._kernels")
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the fallback only")

    print(f"{'N':>7} {'backend':>9} {'seconds':>10} {'ns/step':>9} {'speedup':>8} {'rel diff':>9}")
    for j in args.log2n:
        rule = build_rule("hodnet", args.alpha, j)
        x = np.ascontiguousarray(rule.nodes[:, 0])
        w = np.ascontiguousarray(rule.weights)
        steps = x.size * args.m
        t_py, (_, ref) = _time(lambda: _kernels_py.hermite_series(x, w, args.alpha, args.m),
                               args.repeat)
        print(f"{x.size:>7} {'python':>9} {t_py:>10.4f} {1e9 * t_py / steps:>9.2f} {'1.0':>8} {'-':>9}")
        if compiled is not None:
            t_c, (_, val) = _time(
                lambda: compiled.hermite_series(x, w, args.alpha, args.m, args.threads), args.repeat)
            diff = abs(val - ref) / abs(ref)
            print(f"{x.size:>7} {compiled.BACKEND:>9} {t_c:>10.4f} {1e9 * t_c / steps:>9.2f} "
                  f"{t_py / t_c:>8.1f} {diff:>9.1e}")


if __name__ == "__main__":
    main()
