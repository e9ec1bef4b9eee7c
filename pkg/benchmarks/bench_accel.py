"""Micro-benchmark: jitted kernels vs the pure-numpy fallbacks.

Run: python benchmarks/bench_accel.py --size 400 --repeats 5

Both code paths live in ftsband.accel; at import time the package picks one
based on numba availability and the FTSBAND_DISABLE_NUMBA flag. Here we call
the private implementations directly so a single process can time both.
"""

import argparse
import time

import numpy as np

from ftsband import accel


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best * 1000.0


def bench_pairwise(size, dim, repeats):
    rng = np.random.default_rng(0)
    pts = np.ascontiguousarray(rng.standard_normal((size, dim)))
    accel._pairwise_dists_jit(pts)  # warm up / compile
    t_np = best_of(accel._pairwise_dists_numpy, (pts,), repeats)
    t_nb = best_of(accel._pairwise_dists_jit, (pts,), repeats)
    a = accel._pairwise_dists_numpy(pts)
    b = accel._pairwise_dists_jit(pts)
    assert np.array_equal(a, b), "kernel paths disagree"
    return t_np, t_nb


def bench_bootstrap_paths(b, n, m, d, repeats):
    rng = np.random.default_rng(1)
    args = (
        rng.standard_normal(m),
        rng.integers(0, n - 1, size=(b, n - 1)),
        rng.standard_normal((n - 1, m)) * 0.3,
        rng.standard_normal(m) * 0.1,
        rng.standard_normal((m, m)) * 0.05,
        rng.standard_normal((d, m)) * 0.2,
    )
    args = tuple(np.ascontiguousarray(x) for x in args)
    accel._bootstrap_paths_jit(*args)  # warm up / compile
    t_np = best_of(accel._bootstrap_paths_numpy, args, repeats)
    t_nb = best_of(accel._bootstrap_paths_jit, args, repeats)
    out_np = accel._bootstrap_paths_numpy(*args)
    out_nb = accel._bootstrap_paths_jit(*args)
    assert np.allclose(out_np, out_nb, rtol=0, atol=1e-12), "kernel paths disagree"
    return t_np, t_nb


def report(name, t_np, t_nb):
    print(f"{name:<28} numpy {t_np:9.3f} ms   numba {t_nb:9.3f} ms   "
          f"speedup {t_np / max(t_nb, 1e-9):6.2f}x")


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--size", type=int, default=400, help="point cloud size B")
    p.add_argument("--dim", type=int, default=5)
    p.add_argument("--repeats", type=int, default=5)
    args = p.parse_args()

    if not accel.numba_active():
        print("warning: numba inactive in this process; "
              "'numba' timings below run the plain-python definitions")

    t_np, t_nb = bench_pairwise(args.size, args.dim, args.repeats)
    report(f"pairwise_dists B={args.size}", t_np, t_nb)

    t_np, t_nb = bench_bootstrap_paths(args.size, 100, 64, args.dim, args.repeats)
    report(f"bootstrap_paths B={args.size}", t_np, t_nb)


if __name__ == "__main__":
    main()
