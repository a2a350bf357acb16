"""Compare the numba and numpy kernel backends.

Two parts:

* each hot kernel called directly under both implementations (same inputs,
  best of ``--repeat`` runs, after one warm-up call so JIT compilation is
  excluded);
* the full select pipeline and a short k-means evaluation run in a fresh
  interpreter per backend, switched with ``MMFS_DISABLE_NUMBA``.

Usage::

    python benchmarks/bench_kernels.py [--n 2000] [--d 256] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from mmfs import kernels


def best_of(fn, args, repeat):
    fn(*args)  # warm-up / compile
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_table(N, d, c, repeat):
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(N, d))
    D = kernels.pairwise_distances_numpy(pts)
    Pt = rng.random((N, N)) * (rng.random((N, N)) < 0.3)
    centers = pts[:c].copy()
    a = rng.integers(0, c, N)
    b = rng.integers(0, c, N)
    cases = [
        ("pairwise_distances", (pts,)),
        ("knn", (D, 5)),
        ("fold_reachability", (np.zeros((N, N)), Pt, False, 1e-15)),
        ("assign", (pts, centers)),
        ("contingency", (a, b, c, c)),
    ]
    rows = []
    for name, args in cases:
        t_np = best_of(getattr(kernels, f"{name}_numpy"), args, repeat)
        t_nb = best_of(getattr(kernels, f"{name}_numba"), args, repeat) if kernels.HAVE_NUMBA else float("nan")
        rows.append((name, t_np, t_nb))
    return rows


PIPELINE = r"""
import json, sys, time
import numpy as np
from mmfs import DataMatrix, kernels
from mmfs.evaluation import evaluate_subset
from mmfs.select import select_maxP
N, d, c = map(int, sys.argv[1:4])
rng = np.random.default_rng(1)
y = np.repeat(np.arange(c), N // c)
X = DataMatrix((rng.normal(0, 2, (c, d))[y] + rng.normal(size=(len(y), d))).T)
t0 = time.perf_counter(); select_maxP(X, s=min(50, d)); t_sel = time.perf_counter() - t0
t0 = time.perf_counter(); select_maxP(X, s=min(50, d)); t_sel2 = time.perf_counter() - t0
t0 = time.perf_counter(); evaluate_subset(X, range(min(50, d)), y, c, repeats=5)
t_eval = time.perf_counter() - t0
print(json.dumps({"backend": kernels.backend(), "select_first": t_sel, "select": t_sel2,
                  "kmeans_x5": t_eval}))
"""


def pipeline_run(N, d, c, disable):
    env = dict(os.environ, MMFS_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", PIPELINE, str(N), str(d), str(c)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000, help="instances")
    ap.add_argument("--d", type=int, default=256, help="features")
    ap.add_argument("--c", type=int, default=10, help="clusters")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    print(f"kernels, N={args.n} d={args.d} c={args.c} (best of {args.repeat}, seconds)")
    print(f"{'kernel':<20} {'numpy':>10} {'numba':>10} {'speedup':>8}")
    for name, t_np, t_nb in kernel_table(args.n, args.d, args.c, args.repeat):
        print(f"{name:<20} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:8.1f}x")

    print(f"\npipeline in a fresh interpreter per backend (seconds)")
    print(f"{'backend':<8} {'select (1st)':>12} {'select':>10} {'kmeans x5':>10}")
    for disable in ([False, True] if kernels.HAVE_NUMBA else [True]):
        r = pipeline_run(args.n, args.d, args.c, disable)
        print(f"{r['backend']:<8} {r['select_first']:12.3f} {r['select']:10.3f} {r['kmeans_x5']:10.3f}")


if __name__ == "__main__":
    main()
