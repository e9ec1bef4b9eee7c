"""Gaussian-kernel RKHS representation of raw curves.

Smooths each discretized curve by kernel ridge regression and extracts a
truncated coefficient vector from the Gram-matrix eigensystem, so that every
curve in a series lives in one shared d-dimensional basis.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import DimensionError, InputError, SingularSystemError, TruncationError
from .numkit import EigenSystem
from .policy import DEFAULT_POLICY


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing sampling points in [0, 1]."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise InputError("grid needs at least 2 points")
        if not np.all(np.diff(pts) > 0):
            raise InputError("grid points must be strictly increasing")
        if pts[0] < 0.0 or pts[-1] > 1.0:
            raise InputError("grid points must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.size


def uniform_grid(m: int) -> TimeGrid:
    """Left-closed uniform grid t_i = (i - 1)/m, i = 1..m (excludes t = 1)."""
    return TimeGrid(np.arange(m) / m)


@dataclass(frozen=True)
class RawCurveSeries:
    """Ordered curves sampled on a shared grid; shape (n, m)."""

    grid: TimeGrid
    curves: np.ndarray

    def __post_init__(self):
        curves = np.asarray(self.curves, dtype=np.float64)
        if curves.ndim != 2:
            raise InputError("curves must be a 2-D array (n, m)")
        if curves.shape[1] != len(self.grid):
            raise DimensionError(
                f"curves have {curves.shape[1]} columns but grid has "
                f"{len(self.grid)} points"
            )
        if not np.isfinite(curves).all():
            raise InputError("curves contain non-finite values")
        object.__setattr__(self, "curves", curves)

    @property
    def n(self) -> int:
        return self.curves.shape[0]


@dataclass(frozen=True)
class KernelSpec:
    """Gaussian kernel K(t, s) = exp(-sigma * (t - s)^2)."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise InputError("kernel bandwidth sigma must be > 0")


@dataclass(frozen=True)
class RkhsBasis:
    grid: TimeGrid
    kernel: KernelSpec
    gamma: float
    eig: EigenSystem
    d: int
    rank: int
    gram: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class RkhsRepresentation:
    basis: RkhsBasis
    coeffs: np.ndarray  # (n, d)
    smoothed: np.ndarray  # (n, m) fitted values K @ a
    ridge_weights: np.ndarray = field(repr=False)  # (n, m) solutions a

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]


def gram_matrix(grid: TimeGrid, kernel: KernelSpec) -> np.ndarray:
    t = grid.points
    diff = t[:, None] - t[None, :]
    return np.exp(-kernel.sigma * diff * diff)


def smooth_curve(
    z: np.ndarray, gram: np.ndarray, gamma: float
) -> tuple[np.ndarray, np.ndarray]:
    """Kernel ridge smoother: solve (gamma*I + K) a = z, fitted = K a."""
    z = np.asarray(z, dtype=np.float64)
    m = gram.shape[0]
    if z.shape[0] != m:
        raise DimensionError(f"curve length {z.shape[0]} != grid size {m}")
    if gamma < 0:
        raise InputError("gamma must be >= 0")
    try:
        a = numkit.solve_linear(gamma * np.eye(m) + gram, z)
    except SingularSystemError as exc:
        raise SingularSystemError(
            f"ridge system singular at gamma={gamma}; use gamma > 0"
        ) from exc
    return a, gram @ a


def retained_rank(eig: EigenSystem, rel_tol: float = DEFAULT_POLICY.rank_rel_tol) -> int:
    lmax = float(eig.values[0])
    if lmax <= 0:
        return 0
    return int(np.sum(eig.values >= rel_tol * lmax))


def extract_coefficients(a: np.ndarray, eig: EigenSystem, d: int) -> np.ndarray:
    """Projection coefficients c_i = (l_i / sqrt(m)) * (a^T v_i), i = 1..d."""
    rank = retained_rank(eig)
    if d > rank:
        raise TruncationError(f"d={d} exceeds retained rank {rank}")
    m = eig.vectors.shape[0]
    return (eig.values[:d] / np.sqrt(m)) * (eig.vectors[:, :d].T @ a)


def reconstruct_on_grid(coeffs: np.ndarray, eig: EigenSystem, m: int) -> np.ndarray:
    """Nystrom expansion sum_i c_i * sqrt(m) * v_i on the sampling grid."""
    d = np.asarray(coeffs).shape[-1]
    return np.sqrt(m) * (eig.vectors[:, :d] @ np.asarray(coeffs, dtype=np.float64).T).T


def make_basis(grid: TimeGrid, kernel: KernelSpec, gamma: float, d: int) -> RkhsBasis:
    gram = gram_matrix(grid, kernel)
    eig = numkit.sym_eigen(gram)
    rank = retained_rank(eig)
    if not 1 <= d <= rank:
        raise TruncationError(f"d={d} outside valid range [1, {rank}]")
    return RkhsBasis(grid=grid, kernel=kernel, gamma=gamma, eig=eig, d=d, rank=rank, gram=gram)


def represent_series(
    series: RawCurveSeries, kernel: KernelSpec, gamma: float, d: int
) -> RkhsRepresentation:
    """Smooth and project every curve of a series with one shared eigensystem."""
    basis = make_basis(series.grid, kernel, gamma, d)
    return represent_with_basis(series.curves, basis)


def represent_with_basis(curves: np.ndarray, basis: RkhsBasis) -> RkhsRepresentation:
    curves = np.atleast_2d(np.asarray(curves, dtype=np.float64))
    m = len(basis.grid)
    if curves.shape[1] != m:
        raise DimensionError(f"curves have {curves.shape[1]} columns, grid has {m}")
    system = basis.gamma * np.eye(m) + basis.gram
    a = numkit.solve_linear(system, curves.T).T  # (n, m)
    smoothed = a @ basis.gram  # gram symmetric
    scale = basis.eig.values[: basis.d] / np.sqrt(m)
    coeffs = (a @ basis.eig.vectors[:, : basis.d]) * scale
    return RkhsRepresentation(basis=basis, coeffs=coeffs, smoothed=smoothed, ridge_weights=a)


def projection_matrix(basis: RkhsBasis) -> np.ndarray:
    """Matrix P with P @ z = coefficients of z, shape (d, m).

    Composition of the ridge solve and the eigen projection; applying it to
    raw curve values reproduces represent_with_basis coefficients.
    """
    m = len(basis.grid)
    system = basis.gamma * np.eye(m) + basis.gram
    inv = np.linalg.solve(system, np.eye(m))
    scale = (basis.eig.values[: basis.d] / np.sqrt(m))[:, None]
    return scale * (basis.eig.vectors[:, : basis.d].T @ inv)


def reconstruction_matrix(basis: RkhsBasis) -> np.ndarray:
    """Matrix R with R @ coeffs = curve values on the grid, shape (m, d)."""
    m = len(basis.grid)
    return np.sqrt(m) * basis.eig.vectors[:, : basis.d]
