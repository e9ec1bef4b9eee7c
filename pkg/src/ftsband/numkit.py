"""Dense numerical primitives: symmetric eigendecompositions, linear solves,
PSD square roots and 2-D convex hull geometry.

Matrices and vectors are plain numpy arrays throughout.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateHullError,
    DimensionError,
    DomainError,
    NotPsdError,
    NumericError,
    RankZeroError,
    SingularSystemError,
)
from .policy import DEFAULT_POLICY, NumericPolicy


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues (descending) and orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class Hull2D:
    """Convex polygon vertices in counter-clockwise order, shape (k, 2)."""

    vertices: np.ndarray

    @property
    def t_range(self) -> tuple[float, float]:
        return float(self.vertices[:, 0].min()), float(self.vertices[:, 0].max())


def _as_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def sym_eigen(m: np.ndarray) -> EigenSystem:
    """Eigendecomposition of a symmetric matrix, eigenvalues descending.

    The input is symmetrized as (M + M^T)/2 before decomposing.
    """
    m = _as_square(m)
    sym = 0.5 * (m + m.T)
    try:
        values, vectors = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericError(f"eigendecomposition failed to converge: {exc}") from exc
    order = np.argsort(values)[::-1]
    return EigenSystem(values=values[order], vectors=vectors[:, order])


def solve_linear(
    a: np.ndarray, b: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Solve a @ x = b, rejecting systems with condition number > 1e12.

    ``b`` may carry multiple right-hand sides as columns.
    """
    a = _as_square(a)
    b = np.asarray(b, dtype=np.float64)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"rhs length {b.shape[0]} does not match matrix size {a.shape[0]}"
        )
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > policy.max_condition:
        raise SingularSystemError(
            f"system is numerically singular (condition estimate {cond:.3e}); "
            "consider pseudo_inverse or a positive ridge"
        )
    return np.linalg.solve(a, b)


def pseudo_inverse(
    a: np.ndarray, rel_tol: float, policy: NumericPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Eigenvalue-threshold pseudo-inverse of a symmetric matrix.

    Eigenvalues below rel_tol * lambda_max are dropped.
    """
    eig = sym_eigen(a)
    lmax = float(eig.values[0])
    if not np.isfinite(lmax) or lmax <= 0.0:
        raise RankZeroError("matrix has no positive eigenvalues to invert")
    keep = eig.values >= rel_tol * lmax
    if not keep.any():
        raise RankZeroError("all eigenvalues fell below the retention threshold")
    v = eig.vectors[:, keep]
    inv_vals = 1.0 / eig.values[keep]
    return (v * inv_vals) @ v.T


def psd_sqrt(a: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Symmetric square root of a PSD matrix via eigendecomposition.

    Mildly negative eigenvalues (>= the clip floor) are clipped to zero.
    """
    eig = sym_eigen(a)
    scale = max(1.0, float(abs(eig.values).max()))
    lmin = float(eig.values.min())
    if lmin < policy.psd_reject_floor * scale:
        raise NotPsdError(f"matrix is not PSD (min eigenvalue {lmin:.3e})")
    vals = np.clip(eig.values, 0.0, None)
    v = eig.vectors
    return (v * np.sqrt(vals)) @ v.T


# ---------------------------------------------------------------------------
# 2-D convex hull
# ---------------------------------------------------------------------------


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: np.ndarray, policy: NumericPolicy = DEFAULT_POLICY) -> Hull2D:
    """Monotone-chain convex hull of a set of (t, y) points.

    Raises DegenerateHullError for fewer than 3 points or a collinear set;
    callers fall back to a pointwise envelope band in that case.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DimensionError(f"expected (n, 2) points, got shape {pts.shape}")
    if pts.shape[0] < 3:
        raise DegenerateHullError("need at least 3 points for a 2-D hull")
    uniq = np.unique(pts, axis=0)  # lexicographic sort, duplicates removed
    if uniq.shape[0] < 3:
        raise DegenerateHullError("fewer than 3 distinct points")

    def half(seq):
        chain: list[np.ndarray] = []
        for p in seq:
            while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0.0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(uniq)
    upper = half(uniq[::-1])
    verts = np.array(lower[:-1] + upper[:-1])
    if verts.shape[0] < 3:
        raise DegenerateHullError("points are collinear")
    return Hull2D(vertices=verts)


def hull_contains(h: Hull2D, p, slack: float = DEFAULT_POLICY.hull_slack) -> bool:
    """True iff p is inside the hull or within `slack` of every edge."""
    v = h.vertices
    n = v.shape[0]
    px, py = float(p[0]), float(p[1])
    for i in range(n):
        ax, ay = v[i]
        bx, by = v[(i + 1) % n]
        ex, ey = bx - ax, by - ay
        elen = np.hypot(ex, ey)
        # signed distance of p to the edge line; positive on the interior
        # side for CCW polygons
        sd = (ex * (py - ay) - ey * (px - ax)) / elen
        if sd < -slack:
            return False
    return True


def hull_contains_many(
    h: Hull2D, points: np.ndarray, slack: float = DEFAULT_POLICY.hull_slack
) -> np.ndarray:
    """Vectorized membership test for an (n, 2) point array."""
    v = h.vertices
    a = v
    b = np.roll(v, -1, axis=0)
    e = b - a
    elen = np.hypot(e[:, 0], e[:, 1])
    pts = np.asarray(points, dtype=np.float64)
    dx = pts[:, None, 0] - a[None, :, 0]
    dy = pts[:, None, 1] - a[None, :, 1]
    sd = (e[None, :, 0] * dy - e[None, :, 1] * dx) / elen[None, :]
    return (sd >= -slack).all(axis=1)


def hull_bounds_at(h: Hull2D, t: float) -> tuple[float, float]:
    """Lower and upper hull boundary ordinates at abscissa t."""
    tmin, tmax = h.t_range
    if t < tmin or t > tmax:
        raise DomainError(f"abscissa {t} outside hull range [{tmin}, {tmax}]")
    v = h.vertices
    n = v.shape[0]
    ys: list[float] = []
    for i in range(n):
        x1, y1 = v[i]
        x2, y2 = v[(i + 1) % n]
        lo, hi = (x1, x2) if x1 <= x2 else (x2, x1)
        if t < lo or t > hi:
            continue
        if x1 == x2:
            ys.extend((y1, y2))
        else:
            frac = (t - x1) / (x2 - x1)
            ys.append(y1 + frac * (y2 - y1))
    return min(ys), max(ys)
