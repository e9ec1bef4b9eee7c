"""ARH(1) estimation on RKHS coefficient vectors.

The autoregression matrix is obtained from the lag-0 / lag-1 empirical
covariances of the centered coefficients through the Yule-Walker relation,
with an eigenvalue-threshold pseudo-inverse (plus optional additive ridge)
standing in for the covariance inverse.
"""

import json
from dataclasses import dataclass

import numpy as np

from . import numkit, rkhs
from .errors import DimensionError, RankZeroError, SingularCovarianceError
from .policy import DEFAULT_POLICY
from .rkhs import KernelSpec, RkhsBasis, RkhsRepresentation, TimeGrid

COV_PINV_REL_TOL = 1e-8


@dataclass(frozen=True)
class ArhModel:
    mean_coeffs: np.ndarray  # (d,)
    autoreg: np.ndarray  # (d, d) solves cov0 @ autoreg = cov1
    cov0: np.ndarray
    cov1: np.ndarray
    basis: RkhsBasis | None
    ridge: float = 0.0

    @property
    def d(self) -> int:
        return self.mean_coeffs.shape[0]


@dataclass(frozen=True)
class ResidualPool:
    residuals: np.ndarray  # (n - 1, m)
    centered: bool


def fit_coefficients(coeffs: np.ndarray, ridge: float = 0.0) -> ArhModel:
    """Fit the ARH(1) directly on an (n, d) coefficient matrix.

    Used both by the RKHS pipeline and by consistency checks that feed
    simulation-basis coefficients straight in.
    """
    coeffs = np.asarray(coeffs, dtype=np.float64)
    n, d = coeffs.shape
    if n < d + 2:
        raise SingularCovarianceError(
            f"need at least d + 2 = {d + 2} curves to fit, got {n}"
        )
    if ridge < 0:
        raise ValueError("ridge must be >= 0")
    mean = coeffs.mean(axis=0)
    dev = coeffs - mean
    cov0 = dev.T @ dev / n
    cov1 = dev[:-1].T @ dev[1:] / (n - 1)
    try:
        inv = numkit.pseudo_inverse(cov0 + ridge * np.eye(d), COV_PINV_REL_TOL)
    except RankZeroError as exc:
        raise SingularCovarianceError(
            "coefficient covariance is numerically singular; "
            "increase ridge or reduce the truncation order d"
        ) from exc
    autoreg = inv @ cov1
    return ArhModel(
        mean_coeffs=mean, autoreg=autoreg, cov0=cov0, cov1=cov1, basis=None, ridge=ridge
    )


def fit(rep: RkhsRepresentation, ridge: float = 0.0) -> ArhModel:
    """Fit the ARH(1) on the coefficient vectors of a representation."""
    model = fit_coefficients(rep.coeffs, ridge=ridge)
    return ArhModel(
        mean_coeffs=model.mean_coeffs,
        autoreg=model.autoreg,
        cov0=model.cov0,
        cov1=model.cov1,
        basis=rep.basis,
        ridge=ridge,
    )


def predict_next(model: ArhModel, last_coeffs: np.ndarray) -> np.ndarray:
    """One-step-ahead prediction in coefficient space.

    The Yule-Walker matrix maps lagged to current coefficients through its
    transpose: c_next = mean + autoreg^T @ (c_last - mean).
    """
    last = np.asarray(last_coeffs, dtype=np.float64)
    if last.shape[-1] != model.d:
        raise DimensionError(
            f"coefficient vector length {last.shape[-1]} != model d {model.d}"
        )
    return model.mean_coeffs + (last - model.mean_coeffs) @ model.autoreg


def fitted_and_residuals(
    model: ArhModel, rep: RkhsRepresentation
) -> tuple[np.ndarray, ResidualPool]:
    """One-step fitted curves for k = 2..n and the centered residual pool.

    Residual sign convention: residual = fitted - observed smoothed curve.
    """
    if model.basis is None:
        raise ValueError("model carries no basis; fit it through arh.fit")
    pred_coeffs = predict_next(model, rep.coeffs[:-1])  # (n-1, d)
    fitted = rkhs.reconstruct_on_grid(pred_coeffs, model.basis.eig, len(model.basis.grid))
    residuals = fitted - rep.smoothed[1:]
    residuals = residuals - residuals.mean(axis=0)
    return fitted, ResidualPool(residuals=residuals, centered=True)


def mean_curve(model: ArhModel) -> np.ndarray:
    """Estimated mean function on the grid."""
    if model.basis is None:
        raise ValueError("model carries no basis")
    return rkhs.reconstruct_on_grid(model.mean_coeffs, model.basis.eig, len(model.basis.grid))


# ---------------------------------------------------------------------------
# JSON serialization (fit / predict separation in the CLI)
# ---------------------------------------------------------------------------

MODEL_SCHEMA_VERSION = 1


def model_to_dict(model: ArhModel, fingerprint: dict | None = None) -> dict:
    if model.basis is None:
        raise ValueError("only basis-carrying models are serializable")
    doc = {
        "version": MODEL_SCHEMA_VERSION,
        "mean_coeffs": model.mean_coeffs.tolist(),
        "autoreg": model.autoreg.tolist(),
        "cov0": model.cov0.tolist(),
        "cov1": model.cov1.tolist(),
        "ridge": model.ridge,
        "basis": {
            "grid": model.basis.grid.points.tolist(),
            "sigma": model.basis.kernel.sigma,
            "gamma": model.basis.gamma,
            "d": model.basis.d,
        },
    }
    if fingerprint:
        doc["fingerprint"] = fingerprint
    return doc


def model_from_dict(doc: dict) -> ArhModel:
    meta = doc["basis"]
    basis = rkhs.make_basis(
        TimeGrid(np.array(meta["grid"])),
        KernelSpec(sigma=float(meta["sigma"])),
        gamma=float(meta["gamma"]),
        d=int(meta["d"]),
    )
    return ArhModel(
        mean_coeffs=np.array(doc["mean_coeffs"], dtype=np.float64),
        autoreg=np.array(doc["autoreg"], dtype=np.float64),
        cov0=np.array(doc["cov0"], dtype=np.float64),
        cov1=np.array(doc["cov1"], dtype=np.float64),
        basis=basis,
        ridge=float(doc.get("ridge", 0.0)),
    )


def save_model(model: ArhModel, path, fingerprint: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model, fingerprint), fh)


def load_model(path) -> ArhModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
