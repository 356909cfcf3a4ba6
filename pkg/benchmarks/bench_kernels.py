#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Times the three hot loops on synthetic workloads sized like the target data
(level-per-day columns) and reports per-backend timings, speedups, and the
maximum cross-backend deviation.

Usage: python benchmarks/bench_kernels.py [--n 20000] [--d 200] [--k 8]
"""

import argparse
import time

import numpy as np

from playerfactor._kernels import numpy_backend

try:
    from playerfactor._kernels import _fast
except ImportError:
    _fast = None


def _time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def _workloads(n, d, k, seed):
    rng = np.random.default_rng(seed)
    V = rng.random((d, n)) * 80.0
    sel = V[:, rng.choice(n, k, replace=False)]
    diff = sel[:, :, None] - sel[:, None, :]
    sel_d2 = (diff**2).sum(axis=0)
    cand_d2 = np.empty((k, n))
    for j in range(k):
        cand_d2[j] = ((V - sel[:, j][:, None]) ** 2).sum(axis=0)

    X = rng.normal(size=(k, n)) * 2.0

    WtW = sel.T @ sel
    WtV = sel.T @ V
    lam = float(np.linalg.eigvalsh(WtW).max())
    H0 = np.full((k, n), 1.0 / k)
    step0 = 1.0 / (2.0 * lam)

    return {
        "cm_det_scan": lambda mod: mod.cm_det_scan(sel_d2[:-1, :-1], cand_d2[:-1]),
        "project_columns_to_simplex": lambda mod: mod.project_columns_to_simplex(X),
        "pgd_simplex_lsq": lambda mod: mod.pgd_simplex_lsq(
            WtW, WtV, H0, step0, 1e-8, 200),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=20000, help="columns (players)")
    parser.add_argument("--d", type=int, default=200, help="rows (days)")
    parser.add_argument("--k", type=int, default=8, help="basis vectors")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = [numpy_backend]
    if _fast is not None:
        backends.append(_fast)
    else:
        print("compiled backend not built; timing the numpy fallback only")

    work = _workloads(args.n, args.d, args.k, args.seed)
    print(f"workload: n={args.n} d={args.d} k={args.k} "
          f"(best of {args.repeat} runs)\n")
    header = f"{'kernel':<30}" + "".join(f"{mod.NAME:>12}" for mod in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}{'rel dev':>12}"
    print(header)

    for name, call in work.items():
        times = []
        outputs = []
        for mod in backends:
            best, out = _time(lambda m=mod: call(m), args.repeat)
            times.append(best)
            outputs.append(out if isinstance(out, np.ndarray) else out[0])
        line = f"{name:<30}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(backends) == 2:
            scale = max(float(np.abs(outputs[0]).max()), 1e-300)
            dev = float(np.max(np.abs(outputs[0] - outputs[1]))) / scale
            line += f"{times[0] / times[1]:>9.1f}x{dev:>12.2e}"
        print(line)


if __name__ == "__main__":
    main()
