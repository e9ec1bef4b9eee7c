"""Hot numerical kernels with optional numba acceleration.

Each kernel ships in two versions: a numba ``@njit`` implementation and a
pure-numpy fallback. The fallback is selected when numba is unavailable or
when the environment variable ``FTSBAND_DISABLE_NUMBA`` is set to a truthy
value (``1``, ``true``, ``yes``). ``benchmarks/bench_accel.py`` compares the
two paths.
"""

import os

import numpy as np

_DISABLE = os.environ.get("FTSBAND_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

try:
    if _DISABLE:
        raise ImportError("numba disabled via FTSBAND_DISABLE_NUMBA")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via env flag
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        # identity decorator so the jitted definitions stay importable
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def numba_active() -> bool:
    """True when the jitted kernel path is in use."""
    return NUMBA_ENABLED


# ---------------------------------------------------------------------------
# pairwise distances / kNN mean distances
# ---------------------------------------------------------------------------


def _pairwise_dists_numpy(points):
    # accumulate coordinate by coordinate so the summation order is
    # identical to the jitted kernel (bitwise-reproducible distances)
    b, d = points.shape
    acc = np.zeros((b, b))
    for q in range(d):
        diff = points[:, q, None] - points[None, :, q]
        acc += diff * diff
    return np.sqrt(acc)


@njit(cache=True)
def _pairwise_dists_jit(points):  # pragma: no cover - numba path
    b, d = points.shape
    out = np.zeros((b, b))
    for i in range(b):
        for j in range(i + 1, b):
            acc = 0.0
            for q in range(d):
                diff = points[i, q] - points[j, q]
                acc += diff * diff
            dist = np.sqrt(acc)
            out[i, j] = dist
            out[j, i] = dist
    return out


def pairwise_dists(points: np.ndarray) -> np.ndarray:
    """Full Euclidean distance matrix of a (B, d) point cloud."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    if NUMBA_ENABLED:
        return _pairwise_dists_jit(points)
    return _pairwise_dists_numpy(points)


def knn_mean_dists(points: np.ndarray, k: int) -> np.ndarray:
    """Mean distance from each point to its k nearest neighbours.

    Exact (brute force); the point itself is excluded from its
    neighbourhood. Duplicate points (distance 0) are allowed.
    """
    dists = pairwise_dists(points)
    b = dists.shape[0]
    # sorting each row puts the self-distance (exactly 0.0) first; with
    # duplicates any zero may be dropped, the mean is unchanged
    ordered = np.sort(dists, axis=1)
    return ordered[:, 1 : k + 1].mean(axis=1)


# ---------------------------------------------------------------------------
# bootstrap series recursion
# ---------------------------------------------------------------------------


def _bootstrap_paths_numpy(z1, idx, pool, offset, step, proj):
    b, nm1 = idx.shape
    d = proj.shape[0]
    coeffs = np.empty((b, nm1 + 1, d))
    cur = np.broadcast_to(z1, (b, z1.size)).copy()
    coeffs[:, 0, :] = cur @ proj.T
    for k in range(nm1):
        cur = offset + cur @ step.T + pool[idx[:, k]]
        coeffs[:, k + 1, :] = cur @ proj.T
    return coeffs


@njit(cache=True)
def _bootstrap_paths_jit(z1, idx, pool, offset, step, proj):  # pragma: no cover
    b, nm1 = idx.shape
    m = z1.size
    d = proj.shape[0]
    step_t = np.ascontiguousarray(step.T)
    proj_t = np.ascontiguousarray(proj.T)
    coeffs = np.empty((b, nm1 + 1, d))
    cur = np.empty((b, m))
    for r in range(b):
        cur[r, :] = z1
    coeffs[:, 0, :] = np.dot(cur, proj_t)
    for k in range(nm1):
        nxt = np.dot(cur, step_t)
        for r in range(b):
            nxt[r] += offset + pool[idx[r, k]]
        cur = nxt
        coeffs[:, k + 1, :] = np.dot(cur, proj_t)
    return coeffs


def bootstrap_paths(
    z1: np.ndarray,
    idx: np.ndarray,
    pool: np.ndarray,
    offset: np.ndarray,
    step: np.ndarray,
    proj: np.ndarray,
) -> np.ndarray:
    """Run the residual-bootstrap series recursion for all replicates.

    Starting from the shared first curve ``z1``, each replicate r iterates
    the affine one-step predictor plus a resampled residual,
    ``cur <- offset + step @ cur + pool[idx[r, k]]``, and the coefficient
    projection ``proj @ cur`` of every visited curve is recorded.

    Returns an array of shape (B, n, d) of projected coefficient paths.
    """
    z1 = np.ascontiguousarray(z1, dtype=np.float64)
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    pool = np.ascontiguousarray(pool, dtype=np.float64)
    offset = np.ascontiguousarray(offset, dtype=np.float64)
    step = np.ascontiguousarray(step, dtype=np.float64)
    proj = np.ascontiguousarray(proj, dtype=np.float64)
    if NUMBA_ENABLED:
        return _bootstrap_paths_jit(z1, idx, pool, offset, step, proj)
    return _bootstrap_paths_numpy(z1, idx, pool, offset, step, proj)
