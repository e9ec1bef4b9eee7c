"""The jitted kernels and the pure-numpy fallbacks must agree bitwise."""

import os
import subprocess
import sys

import numpy as np

from ftsband import accel


def _random_bootstrap_inputs(seed=0, b=12, n=30, m=16, d=4):
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(m)
    idx = rng.integers(0, n - 1, size=(b, n - 1))
    pool = rng.standard_normal((n - 1, m)) * 0.3
    offset = rng.standard_normal(m) * 0.1
    step = rng.standard_normal((m, m)) * 0.05
    proj = rng.standard_normal((d, m)) * 0.2
    return z1, idx, pool, offset, step, proj


def test_pairwise_dists_paths_agree_bitwise():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((120, 6))
    a = accel._pairwise_dists_numpy(pts)
    b = accel._pairwise_dists_jit(np.ascontiguousarray(pts))
    assert np.array_equal(a, b)


def test_bootstrap_paths_paths_agree():
    args = _random_bootstrap_inputs()
    a = accel._bootstrap_paths_numpy(*args)
    cargs = tuple(np.ascontiguousarray(x) for x in args)
    b = accel._bootstrap_paths_jit(*cargs)
    # the jitted recursion accumulates matrix products element by element;
    # agreement is to rounding, not bitwise, for the matmul-based fallback
    assert np.allclose(a, b, rtol=0, atol=1e-12)


def test_knn_mean_dists_known_values():
    pts = np.array([[0.0], [1.0], [3.0]])
    assert np.array_equal(accel.knn_mean_dists(pts, 1), [1.0, 1.0, 2.0])
    assert np.array_equal(accel.knn_mean_dists(pts, 2), [2.0, 1.5, 2.5])


def test_env_flag_selects_numpy_fallback():
    code = (
        "import ftsband.accel as a; "
        "print(a.numba_active())"
    )
    env = dict(os.environ, FTSBAND_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert out.stdout.strip() == "False"
    env.pop("FTSBAND_DISABLE_NUMBA")
    out2 = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env=env
    )
    assert out2.stdout.strip() in ("True", "False")  # numba optional at runtime


def test_disabled_path_gives_same_scores():
    code = (
        "import numpy as np, ftsband.accel as a; "
        "rng = np.random.default_rng(3); pts = rng.standard_normal((80, 4)); "
        "print(repr(a.knn_mean_dists(pts, 9).sum()))"
    )
    runs = {}
    for flag in ("0", "1"):
        env = dict(os.environ, FTSBAND_DISABLE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, "-c", code], capture_output=True, text=True, env=env
        )
        assert out.returncode == 0, out.stderr
        runs[flag] = out.stdout.strip()
    assert runs["0"] == runs["1"]
