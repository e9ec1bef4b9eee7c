"""ARH(1) trajectory generator in a finite Fourier basis.

Operators are diagonal by default, completed with a geometrically decreasing
perturbation, and checked for compatibility: the innovation covariance
Gamma_eps = Gamma0 - Psi Gamma0 Psi^T must be PSD.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import DimensionError, IncompatibleOperatorsError, InputError, StationarityError
from .policy import DEFAULT_POLICY
from .rkhs import RawCurveSeries, TimeGrid, uniform_grid

DEFAULT_PSI_DIAG = (0.45, 0.9, 0.34, 0.45)
DEFAULT_GAMMA0_DIAG = (0.5, 0.23, 0.018)


@dataclass(frozen=True)
class FourierBasis:
    """Fourier functions evaluated on a grid; values has shape (m', m)."""

    dim: int
    grid: TimeGrid
    values: np.ndarray


@dataclass(frozen=True)
class ArhSimSpec:
    n: int
    m: int = 64
    m_prime: int = 5
    psi_diag: tuple = DEFAULT_PSI_DIAG
    gamma0_diag: tuple = DEFAULT_GAMMA0_DIAG
    eps: float = 0.05
    seed: int = 0
    burn_in: int = 0

    def __post_init__(self):
        if self.m_prime < max(len(self.psi_diag), len(self.gamma0_diag)):
            raise InputError("m_prime smaller than the given operator diagonals")
        if not self.eps > 0:
            raise InputError("completion perturbation eps must be > 0")
        if any(g <= 0 for g in self.gamma0_diag):
            raise InputError("all gamma0 diagonal entries must be > 0")
        if self.n < 1:
            raise InputError("series length n must be >= 1")


@dataclass(frozen=True)
class SimResult:
    series: RawCurveSeries
    coeff_paths: np.ndarray  # (n, m') true basis coefficients
    gamma_eps: np.ndarray
    innovations: np.ndarray = field(repr=False)  # (n, m') realized eps_k


def fourier_basis(m_prime: int, grid: TimeGrid) -> FourierBasis:
    """phi_1 = 1, phi_2j = sqrt(2) sin(2 pi j t), phi_2j+1 = sqrt(2) cos(2 pi j t)."""
    if m_prime < 1:
        raise InputError("basis dimension must be >= 1")
    t = grid.points
    values = np.empty((m_prime, t.size))
    values[0] = 1.0
    for i in range(1, m_prime):
        j = (i + 1) // 2
        if i % 2 == 1:
            values[i] = np.sqrt(2.0) * np.sin(2.0 * np.pi * j * t)
        else:
            values[i] = np.sqrt(2.0) * np.cos(2.0 * np.pi * j * t)
    return FourierBasis(dim=m_prime, grid=grid, values=values)


def _complete_diag(diag, m_prime: int, eps: float) -> np.ndarray:
    out = np.zeros(m_prime)
    given = len(diag)
    out[:given] = diag
    for j in range(given, m_prime):
        out[j] = eps / 2.0 ** (j + 1 - given)
    return out


def assemble_operators(spec: ArhSimSpec) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal Psi and Gamma0 matrices, completed with decreasing slots."""
    psi_diag = _complete_diag(spec.psi_diag, spec.m_prime, spec.eps)
    gamma0_diag = _complete_diag(spec.gamma0_diag, spec.m_prime, spec.eps)
    if np.max(np.abs(psi_diag)) >= 1.0:
        raise StationarityError(
            f"autoregression diagonal has spectral radius "
            f"{np.max(np.abs(psi_diag)):.4f} >= 1"
        )
    return np.diag(psi_diag), np.diag(gamma0_diag)


def innovation_covariance(psi: np.ndarray, gamma0: np.ndarray) -> np.ndarray:
    """Gamma_eps = Gamma0 - Psi Gamma0 Psi^T, rejected when not PSD."""
    psi = np.asarray(psi, dtype=np.float64)
    gamma0 = np.asarray(gamma0, dtype=np.float64)
    if psi.shape != gamma0.shape or psi.ndim != 2 or psi.shape[0] != psi.shape[1]:
        raise DimensionError("operators must be square matrices of equal size")
    gamma_eps = gamma0 - psi @ gamma0 @ psi.T
    gamma_eps = 0.5 * (gamma_eps + gamma_eps.T)
    min_eig = float(np.linalg.eigvalsh(gamma_eps).min())
    if min_eig < DEFAULT_POLICY.innovation_psd_floor:
        raise IncompatibleOperatorsError(
            f"chosen operators are incompatible with an ARH process "
            f"(innovation covariance min eigenvalue {min_eig:.6g} < 0)"
        )
    return gamma_eps


def simulate(spec: ArhSimSpec) -> SimResult:
    """Generate one trajectory; deterministic given spec.seed.

    Innovations are eps_k = Gamma_eps^{1/2} xi_k with xi_k iid standard
    Gaussian; the recursion starts from Z_0 = eps_0 and runs with zero mean.
    """
    psi, gamma0 = assemble_operators(spec)
    gamma_eps = innovation_covariance(psi, gamma0)
    root = numkit.psd_sqrt(gamma_eps)
    rng = np.random.default_rng(spec.seed)
    # Z_0 = eps_0 seeds the recursion and is not part of the series
    total = spec.n + spec.burn_in + 1
    xi = rng.standard_normal((total, spec.m_prime))
    innov = xi @ root.T  # root symmetric; kept for clarity
    paths = np.empty((total, spec.m_prime))
    paths[0] = innov[0]
    for k in range(1, total):
        paths[k] = psi @ paths[k - 1] + innov[k]
    paths = paths[spec.burn_in + 1 :]
    innov = innov[spec.burn_in + 1 :]
    grid = uniform_grid(spec.m)
    basis = fourier_basis(spec.m_prime, grid)
    curves = paths @ basis.values
    return SimResult(
        series=RawCurveSeries(grid=grid, curves=curves),
        coeff_paths=paths,
        gamma_eps=gamma_eps,
        innovations=innov,
    )
