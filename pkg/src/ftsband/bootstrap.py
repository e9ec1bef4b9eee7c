"""Functional residual bootstrap producing predictive pseudo-replicates.

For each replicate a whole pseudo-series is rebuilt by reinjecting resampled
centered residual curves into the fitted one-step recursion, the
autoregression is optionally re-estimated on that pseudo-series, and the
h-step forecast is iterated from the original last curve with fresh
resampled residuals at every horizon step.
"""

from dataclasses import dataclass, field

import numpy as np

from . import accel, arh, rkhs
from .errors import ReplicateFailureError
from .rkhs import RkhsBasis, RkhsRepresentation

MAX_RETRIES = 10


@dataclass(frozen=True)
class BootstrapSpec:
    B: int = 1000
    h: int = 1
    seed: int = 0
    refit: bool = True

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if self.h < 1:
            raise ValueError("h must be >= 1")


@dataclass(frozen=True)
class BootstrapEnsemble:
    replicates: np.ndarray  # (B, m) horizon-h pseudo-prediction curves
    replicate_coeffs: np.ndarray  # (B, d)
    point_prediction: np.ndarray  # (m,) full-sample model forecast
    residual_pool: np.ndarray = field(repr=False)  # (n - 1, m) centered
    spec: BootstrapSpec | None = None


def _replicate_rng(seed: int, b: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(b,)))


def _predictor_pieces(model: arh.ArhModel):
    """Affine curve-space form of the one-step predictor.

    pred(x) = offset + step @ x reproduces recon(mean + P^T (proj(x) - mean))
    exactly for any curve x on the grid.
    """
    basis = model.basis
    proj = rkhs.projection_matrix(basis)
    recon = rkhs.reconstruction_matrix(basis)
    step = recon @ model.autoreg.T @ proj
    offset = recon @ (model.mean_coeffs - model.autoreg.T @ model.mean_coeffs)
    return proj, recon, offset, step


def _refit_batch(coeff_paths: np.ndarray, ridge: float) -> tuple[np.ndarray, np.ndarray]:
    """Fit the Yule-Walker matrix per replicate on (B, n, d) paths.

    Returns (autoreg (B, d, d), ok (B,) bool). A replicate is flagged not-ok
    when its coefficient covariance has no positive eigenvalues.
    """
    b, n, d = coeff_paths.shape
    mean = coeff_paths.mean(axis=1, keepdims=True)
    dev = coeff_paths - mean
    cov0 = np.einsum("bki,bkj->bij", dev, dev) / n
    cov1 = np.einsum("bki,bkj->bij", dev[:, :-1], dev[:, 1:]) / (n - 1)
    if ridge:
        cov0 = cov0 + ridge * np.eye(d)
    vals, vecs = np.linalg.eigh(0.5 * (cov0 + np.swapaxes(cov0, 1, 2)))
    lmax = vals[:, -1]
    ok = np.isfinite(lmax) & (lmax > 0)
    safe_lmax = np.where(ok, lmax, 1.0)
    keep = vals >= arh.COV_PINV_REL_TOL * safe_lmax[:, None]
    inv_vals = np.where(keep, 1.0 / np.where(vals == 0.0, 1.0, vals), 0.0)
    pinv = np.einsum("bik,bk,bjk->bij", vecs, inv_vals, vecs)
    autoreg = pinv @ cov1
    ok &= np.isfinite(autoreg).all(axis=(1, 2))
    return autoreg, ok


def _forecast(
    z_last: np.ndarray,
    autoregs: np.ndarray,
    mean_coeffs: np.ndarray,
    proj: np.ndarray,
    recon: np.ndarray,
    forecast_eps: np.ndarray | None,
    h: int,
) -> np.ndarray:
    """Iterate the h-step forecast from the original last curve.

    autoregs has shape (B, d, d); forecast_eps, when given, has shape
    (B, h, m) and injects a resampled residual at every horizon step.
    """
    b = autoregs.shape[0]
    cur = np.broadcast_to(z_last, (b, z_last.size)).copy()
    for j in range(h):
        c = cur @ proj.T - mean_coeffs
        c_pred = mean_coeffs + np.einsum("bij,bi->bj", autoregs, c)
        cur = c_pred @ recon.T
        if forecast_eps is not None:
            cur = cur + forecast_eps[:, j, :]
    return cur


def residual_bootstrap(
    rep: RkhsRepresentation,
    model: arh.ArhModel,
    spec: BootstrapSpec,
    pool: arh.ResidualPool | None = None,
    raw_curves: np.ndarray | None = None,
) -> BootstrapEnsemble:
    """Residual bootstrap of the one-step (or h-step) predictive law.

    ``raw_curves`` defaults to the representation's smoothed curves for the
    recursion anchors (first and last observed curve); passing the raw series
    anchors the recursion on the observed data instead.
    """
    if pool is None:
        _, pool = arh.fitted_and_residuals(model, rep)
    residuals = pool.residuals
    pool_n = residuals.shape[0]
    n = rep.n
    proj, recon, offset, step = _predictor_pieces(model)
    if raw_curves is None:
        # recover the raw input curves from the ridge identity
        # z = (gamma*I + K) a = gamma*a + smoothed
        anchors = rep.smoothed + model.basis.gamma * rep.ridge_weights
    else:
        anchors = np.asarray(raw_curves, dtype=np.float64)
    z_first = anchors[0]
    z_last = anchors[-1]

    # point prediction: same forecast path with the full-sample matrix and
    # no injected residuals
    point = _forecast(
        z_last,
        model.autoreg[None, :, :],
        model.mean_coeffs,
        proj,
        recon,
        None,
        spec.h,
    )[0]

    rngs = [_replicate_rng(spec.seed, b) for b in range(spec.B)]
    series_idx = np.stack([r.integers(0, pool_n, size=n - 1) for r in rngs])
    fc_idx = np.stack([r.integers(0, pool_n, size=spec.h) for r in rngs])

    if spec.refit:
        coeff_paths = accel.bootstrap_paths(z_first, series_idx, residuals, offset, step, proj)
        autoregs, ok = _refit_batch(coeff_paths, model.ridge)
        for b in np.nonzero(~ok)[0]:
            autoregs[b] = _retry_replicate(
                rngs[b], z_first, residuals, n - 1, offset, step, proj, model.ridge, b
            )
    else:
        autoregs = np.broadcast_to(model.autoreg, (spec.B, model.d, model.d))

    forecast_eps = residuals[fc_idx]  # (B, h, m)
    replicates = _forecast(
        z_last, autoregs, model.mean_coeffs, proj, recon, forecast_eps, spec.h
    )
    coeffs = project_replicates(replicates, model.basis)
    return BootstrapEnsemble(
        replicates=replicates,
        replicate_coeffs=coeffs,
        point_prediction=point,
        residual_pool=residuals,
        spec=spec,
    )


def _retry_replicate(
    rng, z_first, residuals, nm1, offset, step, proj, ridge, b
) -> np.ndarray:
    pool_n = residuals.shape[0]
    for _ in range(MAX_RETRIES):
        idx = rng.integers(0, pool_n, size=nm1)
        paths = accel.bootstrap_paths(
            z_first, idx[None, :], residuals, offset, step, proj
        )
        autoreg, ok = _refit_batch(paths, ridge)
        if ok[0]:
            return autoreg[0]
    raise ReplicateFailureError(
        f"replicate {b} failed to refit after {MAX_RETRIES} retries"
    )


def project_replicates(curves: np.ndarray, basis: RkhsBasis) -> np.ndarray:
    """Project replicate curves with the fitted Gram eigensystem and d."""
    return rkhs.represent_with_basis(curves, basis).coeffs
