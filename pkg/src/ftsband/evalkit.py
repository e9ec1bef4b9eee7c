"""Metrics, baseline predictors, chronological splits and grid-search
hyperparameter calibration."""

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import arh, bands, bootstrap, rkhs
from .bands import PredictiveBand
from .errors import CalibrationError, DimensionError, InputError
from .rkhs import KernelSpec, RawCurveSeries, RkhsRepresentation


@dataclass(frozen=True)
class SplitSpec:
    train_frac: float = 0.6
    valid_frac: float = 0.2
    test_frac: float = 0.2

    def __post_init__(self):
        fracs = (self.train_frac, self.valid_frac, self.test_frac)
        # test_frac may be 0 for pure train/valid calibration splits
        if self.train_frac <= 0 or self.valid_frac <= 0 or self.test_frac < 0:
            raise InputError("split fractions must be positive (test may be 0)")
        if abs(sum(fracs) - 1.0) > 1e-9:
            raise InputError("split fractions must sum to 1")

    def counts(self, n: int) -> tuple[int, int, int]:
        """Chronological block sizes; the earliest block trains and absorbs
        the rounding remainder."""
        n_valid = int(np.floor(self.valid_frac * n))
        n_test = int(np.floor(self.test_frac * n))
        n_train = n - n_valid - n_test
        if n_train < 1 or n_valid < 1 or (self.test_frac > 0 and n_test < 1):
            raise InputError(f"split of {n} curves leaves an empty block")
        return n_train, n_valid, n_test


@dataclass(frozen=True)
class CalibrationGrid:
    sigmas: tuple
    ds: tuple
    gammas: tuple

    def __post_init__(self):
        if not (self.sigmas and self.ds and self.gammas):
            raise InputError("calibration grid must be non-empty")
        if any(s <= 0 for s in self.sigmas) or any(g < 0 for g in self.gammas):
            raise InputError("sigmas must be > 0 and gammas >= 0")
        if any(int(d) < 1 for d in self.ds):
            raise InputError("ds must be integers >= 1")


@dataclass
class MetricTable:
    """Aggregated rows keyed by (method, nominal coverage level)."""

    rows: list = field(default_factory=list)

    def add(self, method, level, **stats):
        self.rows.append({"method": method, "level": level, **stats})

    def to_csv_lines(self):
        keys = ["method", "level"]
        extra = sorted({k for r in self.rows for k in r if k not in keys})
        header = keys + extra
        lines = [",".join(header)]
        for r in self.rows:
            lines.append(
                ",".join(_fmt(r.get(k, "")) for k in header)
            )
        return lines

    def to_text(self):
        lines = self.to_csv_lines()
        cells = [ln.split(",") for ln in lines]
        widths = [max(len(row[i]) for row in cells) for i in range(len(cells[0]))]
        return "\n".join(
            "  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in cells
        )


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def rmse(pred: np.ndarray, truth: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.shape != truth.shape:
        raise DimensionError(f"shape mismatch {pred.shape} vs {truth.shape}")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def pinball(value: float, pred_quantile: float, tau: float) -> float:
    """Quantile check loss rho_tau(u) = u * (tau - 1{u < 0})."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    u = value - pred_quantile
    return u * (tau - (1.0 if u < 0 else 0.0))


def band_pinball(band: PredictiveBand, truth: np.ndarray, alpha: float) -> float:
    """Two-sided pinball score of a band: lower boundary scored at tau =
    alpha/2, upper at 1 - alpha/2, averaged over the grid."""
    truth = np.asarray(truth, dtype=np.float64)
    lo_tau, hi_tau = alpha / 2.0, 1.0 - alpha / 2.0
    u_lo = truth - band.lower
    u_hi = truth - band.upper
    lo = u_lo * (lo_tau - (u_lo < 0))
    hi = u_hi * (hi_tau - (u_hi < 0))
    return float(np.mean(lo + hi))


def baseline_predict(kind: str, rep: RkhsRepresentation) -> np.ndarray:
    """Historic-mean or persistence prediction from the smoothed curves."""
    if kind == "mean":
        return rep.smoothed.mean(axis=0)
    if kind == "persistence":
        return rep.smoothed[-1]
    raise ValueError(f"unknown baseline kind {kind!r}")


def _rolling_rmse(series, basis, n_train, n_valid, ridge):
    """Fit on the training block, roll one-step predictions through the
    validation block without refitting."""
    all_rep = rkhs.represent_with_basis(series.curves[: n_train + n_valid], basis)
    train_coeffs = all_rep.coeffs[:n_train]
    model = arh.fit_coefficients(train_coeffs, ridge=ridge)
    errs = []
    m = len(basis.grid)
    for j in range(n_train, n_train + n_valid):
        pred_c = arh.predict_next(model, all_rep.coeffs[j - 1])
        pred = rkhs.reconstruct_on_grid(pred_c, basis.eig, m)
        errs.append(rmse(pred, series.curves[j]))
    return float(np.mean(errs))


def _rolling_band_pinball(series, basis, n_train, n_valid, ridge, band_alpha, boot_spec):
    sub = RawCurveSeries(grid=series.grid, curves=series.curves[:n_train])
    rep = rkhs.represent_with_basis(sub.curves, basis)
    model = arh.fit(rep, ridge=ridge)
    losses = []
    for j in range(n_train, n_train + n_valid):
        hist = rkhs.represent_with_basis(series.curves[:j], basis)
        ens = bootstrap.residual_bootstrap(
            hist, model, boot_spec, raw_curves=series.curves[:j]
        )
        scores = bands.knn_entropy_scores(
            ens.replicate_coeffs, bands.default_k(boot_spec.B)
        )
        sel = bands.select_mes(scores, band_alpha)
        band = bands.build_hull_band(ens, sel, series.grid)
        losses.append(band_pinball(band, series.curves[j], band_alpha))
    return float(np.mean(losses))


def calibrate(
    series: RawCurveSeries,
    grid: CalibrationGrid,
    split: SplitSpec,
    objective: str = "rmse",
    band_alpha: float = 0.2,
    ridge: float = 0.0,
    boot_spec: "bootstrap.BootstrapSpec | None" = None,
) -> tuple[float, int, float]:
    """Exhaustive grid search over (sigma, d, gamma).

    Each candidate is fit on the training block and scored by rolling
    one-step predictions (or bands) over the validation block; ties break
    towards smaller d, then sigma, then gamma.
    """
    if objective not in ("rmse", "band_pinball"):
        raise ValueError(f"unknown objective {objective!r}")
    # callers pass only the train+valid prefix as `series`; within it the
    # two blocks keep their relative proportions
    n = series.n
    rel_valid = split.valid_frac / (split.train_frac + split.valid_frac)
    n_valid = int(np.floor(rel_valid * n))
    n_train = n - n_valid
    if n_valid < 1 or n_train < 2:
        raise InputError("series too short for the requested split")
    if boot_spec is None:
        boot_spec = bootstrap.BootstrapSpec(B=200, seed=0, refit=True)

    results = []
    failures = []
    for sigma in grid.sigmas:
        kernel = KernelSpec(sigma=float(sigma))
        for d, gamma in product(grid.ds, grid.gammas):
            try:
                basis = rkhs.make_basis(series.grid, kernel, float(gamma), int(d))
                if objective == "rmse":
                    score = _rolling_rmse(series, basis, n_train, n_valid, ridge)
                else:
                    score = _rolling_band_pinball(
                        series, basis, n_train, n_valid, ridge, band_alpha, boot_spec
                    )
            except Exception as exc:  # candidate-level failure, recorded
                failures.append((sigma, d, gamma, repr(exc)))
                continue
            results.append((score, int(d), float(sigma), float(gamma)))
    if not results:
        detail = "; ".join(
            f"sigma={s}, d={d}, gamma={g}: {e}" for s, d, g, e in failures
        )
        raise CalibrationError(f"all calibration candidates failed: {detail}")
    results.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    best = results[0]
    return best[2], best[1], best[3]
