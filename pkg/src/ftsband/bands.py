"""Minimum-entropy-set selection and predictive band construction.

Replicate coefficient vectors are scored by a kNN local-entropy estimator;
the replicates whose score falls below the (1 - alpha) quantile form the
selected set, and the simultaneous band is the convex hull of their graphs.
Pointwise Gaussian/empirical bands over the same replicates serve as
baselines.
"""

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from . import accel, numkit
from .bootstrap import BootstrapEnsemble
from .errors import DegenerateHullError, DimensionError
from .numkit import Hull2D
from .policy import DEFAULT_POLICY
from .rkhs import TimeGrid


def default_k(b: int) -> int:
    """Default neighbour count ceil(sqrt(B))."""
    return max(1, math.ceil(math.sqrt(b)))


@dataclass(frozen=True)
class EntropyScores:
    k: int
    scores: np.ndarray  # (B,) exp(mean distance to k nearest neighbours)


@dataclass(frozen=True)
class MesSelection:
    alpha: float
    member_indices: np.ndarray  # sorted indices into 1..B (0-based)
    threshold: float


@dataclass(frozen=True)
class PredictiveBand:
    kind: str  # hull | envelope | gaussian_pointwise | empirical_pointwise
    lower: np.ndarray
    upper: np.ndarray
    alpha: float
    grid: TimeGrid
    hull: Hull2D | None = None


@dataclass(frozen=True)
class BandReport:
    covered: bool
    amplitude: float
    kind: str
    alpha: float


def knn_entropy_scores(points: np.ndarray, k: int) -> EntropyScores:
    """Local entropy score exp(mean distance to the k nearest neighbours).

    Exact brute-force kNN; the point itself is excluded, duplicates allowed.
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    b = points.shape[0]
    if not 1 <= k <= b - 1:
        raise ValueError(f"k must be in [1, B-1], got k={k}, B={b}")
    mean_dists = accel.knn_mean_dists(points, k)
    return EntropyScores(k=k, scores=np.exp(mean_dists))


def select_mes(scores: EntropyScores, alpha: float) -> MesSelection:
    """Members are the replicates at or below the (1 - alpha) score quantile.

    The quantile is the order statistic of rank ceil((1 - alpha) * B); ties
    at the threshold are all included.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    s = scores.scores
    b = s.shape[0]
    rank = math.ceil((1.0 - alpha) * b)
    rank = min(max(rank, 1), b)
    threshold = float(np.sort(s)[rank - 1])
    members = np.nonzero(s <= threshold)[0]
    return MesSelection(alpha=alpha, member_indices=members, threshold=threshold)


def _envelope(curves: np.ndarray, grid: TimeGrid, alpha: float) -> PredictiveBand:
    return PredictiveBand(
        kind="envelope",
        lower=curves.min(axis=0),
        upper=curves.max(axis=0),
        alpha=alpha,
        grid=grid,
    )


def build_hull_band(
    ensemble: BootstrapEnsemble, selection: MesSelection, grid: TimeGrid
) -> PredictiveBand:
    """Convex hull of the selected replicates' graph points.

    Degenerate (collinear) point clouds fall back to the pointwise min/max
    envelope, flagged through the band kind.
    """
    members = selection.member_indices
    if members.size < 1:
        raise ValueError("selection is empty")
    curves = ensemble.replicates[members]
    t = grid.points
    cloud = np.column_stack(
        [np.tile(t, curves.shape[0]), curves.reshape(-1)]
    )
    try:
        hull = numkit.convex_hull(cloud)
    except DegenerateHullError:
        return _envelope(curves, grid, selection.alpha)
    bounds = np.array([numkit.hull_bounds_at(hull, ti) for ti in t])
    return PredictiveBand(
        kind="hull",
        lower=bounds[:, 0],
        upper=bounds[:, 1],
        alpha=selection.alpha,
        grid=grid,
        hull=hull,
    )


def build_pointwise_band(
    ensemble: BootstrapEnsemble, alpha: float, kind: str, grid: TimeGrid
) -> PredictiveBand:
    """Pointwise Gaussian or empirical quantile band over the replicates."""
    curves = ensemble.replicates
    b = curves.shape[0]
    if b < 2:
        raise ValueError("pointwise bands need at least 2 replicates")
    if kind == "gaussian":
        mean = curves.mean(axis=0)
        sd = curves.std(axis=0, ddof=1)
        z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
        return PredictiveBand(
            kind="gaussian_pointwise",
            lower=mean - z * sd,
            upper=mean + z * sd,
            alpha=alpha,
            grid=grid,
        )
    if kind == "empirical":
        ordered = np.sort(curves, axis=0)
        lo_rank = min(max(math.ceil(alpha / 2.0 * b), 1), b)
        hi_rank = min(max(math.ceil((1.0 - alpha / 2.0) * b), 1), b)
        return PredictiveBand(
            kind="empirical_pointwise",
            lower=ordered[lo_rank - 1],
            upper=ordered[hi_rank - 1],
            alpha=alpha,
            grid=grid,
        )
    raise ValueError(f"unknown pointwise band kind {kind!r}")


def evaluate_band(
    band: PredictiveBand,
    truth: np.ndarray,
    grid: TimeGrid,
    slack: float = DEFAULT_POLICY.hull_slack,
) -> BandReport:
    """Coverage of a truth curve and trapezoidal band amplitude."""
    truth = np.asarray(truth, dtype=np.float64)
    t = grid.points
    if truth.shape[0] != t.shape[0]:
        raise DimensionError("truth curve does not match the grid")
    if band.kind == "hull" and band.hull is not None:
        pts = np.column_stack([t, truth])
        covered = bool(numkit.hull_contains_many(band.hull, pts, slack=slack).all())
    else:
        covered = bool(
            np.all((truth >= band.lower - slack) & (truth <= band.upper + slack))
        )
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    amplitude = float(trapezoid(band.upper - band.lower, t))
    return BandReport(covered=covered, amplitude=amplitude, kind=band.kind, alpha=band.alpha)
