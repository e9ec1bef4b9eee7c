"""Monte Carlo coverage/amplitude study over simulated ARH trajectories.

Each replicate simulates N + 1 curves, calibrates hyperparameters on an
80/20 train-validation split of the first N, fits on all N, forecasts the
held-out curve and evaluates every band method against it.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import arh, bands, bootstrap, evalkit, rkhs, simulator
from .config import effective_parallelism
from .errors import FtsbandError
from .evalkit import CalibrationGrid, MetricTable, SplitSpec
from .rkhs import KernelSpec, RawCurveSeries

BAND_METHODS = ("fpcb", "gaussian", "empirical")
PREDICTOR_METHODS = ("mean", "persistence")

RECORD_HEADER = ["replicate", "seed", "method", "alpha", "covered", "amplitude", "rmse"]


@dataclass(frozen=True)
class McRecord:
    replicate: int
    seed: int
    method: str
    alpha: float
    covered: bool | None
    amplitude: float | None
    rmse: float


def record_row(r: McRecord) -> list:
    return [
        r.replicate,
        r.seed,
        r.method,
        r.alpha,
        "" if r.covered is None else int(r.covered),
        "" if r.amplitude is None else repr(r.amplitude),
        repr(r.rmse),
    ]


def build_band_set(ensemble, alphas, grid, k=None):
    """Hull plus Gaussian/empirical pointwise bands for every alpha.

    One ensemble and one score vector serve all alphas, which makes the
    hull bands nested across rising nominal coverage.
    """
    if not k:  # None or 0 selects the default neighbour count
        k = bands.default_k(ensemble.replicates.shape[0])
    scores = bands.knn_entropy_scores(ensemble.replicate_coeffs, k)
    out = {}
    for alpha in alphas:
        sel = bands.select_mes(scores, alpha)
        out[alpha] = {
            "fpcb": bands.build_hull_band(ensemble, sel, grid),
            "gaussian": bands.build_pointwise_band(ensemble, alpha, "gaussian", grid),
            "empirical": bands.build_pointwise_band(ensemble, alpha, "empirical", grid),
        }
    return out


def run_replicate(i: int, cfg: dict) -> list[McRecord]:
    mc = cfg["mc"]
    seed = int(mc["base_seed"]) + i
    n_train = int(mc["N"])
    sim_spec = simulator.ArhSimSpec(
        n=n_train + 1,
        m=int(cfg["sim"]["m"]),
        m_prime=int(cfg["sim"]["m_prime"]),
        psi_diag=tuple(cfg["sim"]["psi_diag"]),
        gamma0_diag=tuple(cfg["sim"]["gamma0_diag"]),
        eps=float(cfg["sim"]["eps"]),
        seed=seed,
        burn_in=int(cfg["sim"]["burn_in"]),
    )
    sim = simulator.simulate(sim_spec)
    train = RawCurveSeries(grid=sim.series.grid, curves=sim.series.curves[:n_train])
    truth = sim.series.curves[n_train]

    sigma, d, gamma = resolve_hyperparams(train, cfg)
    ridge = float(cfg["kernel"]["ridge"])
    rep = rkhs.represent_series(train, KernelSpec(sigma=sigma), gamma, d)
    model = arh.fit(rep, ridge=ridge)

    pred_c = arh.predict_next(model, rep.coeffs[-1])
    pred = rkhs.reconstruct_on_grid(pred_c, rep.basis.eig, len(train.grid))
    arh_rmse = evalkit.rmse(pred, truth)
    base_rmse = {
        kind: evalkit.rmse(evalkit.baseline_predict(kind, rep), truth)
        for kind in PREDICTOR_METHODS
    }

    boot = cfg["bootstrap"]
    ens = bootstrap.residual_bootstrap(
        rep,
        model,
        bootstrap.BootstrapSpec(
            B=int(boot["B"]), h=int(boot["h"]), seed=seed, refit=bool(boot["refit"])
        ),
        raw_curves=train.curves,
    )
    alphas = [float(a) for a in cfg["bands"]["alphas"]]
    band_set = build_band_set(ens, alphas, train.grid, cfg["bands"]["k"])

    records = []
    for alpha in alphas:
        for method in BAND_METHODS:
            report = bands.evaluate_band(
                band_set[alpha][method], truth, train.grid, slack=cfg["bands"]["slack"]
            )
            records.append(
                McRecord(i, seed, method, alpha, report.covered, report.amplitude, arh_rmse)
            )
        for method in PREDICTOR_METHODS:
            records.append(McRecord(i, seed, method, alpha, None, None, base_rmse[method]))
    return records


def resolve_hyperparams(train: RawCurveSeries, cfg: dict) -> tuple[float, int, float]:
    """Use pinned (sigma, d) when both are set, otherwise grid-search them."""
    kc = cfg["kernel"]
    if kc["sigma"] is not None and kc["d"] is not None:
        return float(kc["sigma"]), int(kc["d"]), float(kc["gamma"])
    cal = cfg["calibration"]
    grid = CalibrationGrid(
        sigmas=tuple(cal["sigmas"]), ds=tuple(cal["ds"]), gammas=tuple(cal["gammas"])
    )
    split = SplitSpec(train_frac=0.8, valid_frac=0.2, test_frac=0.0)
    return evalkit.calibrate(
        train,
        grid,
        split,
        objective=cal["objective"],
        band_alpha=float(cal["band_alpha"]),
        ridge=float(cfg["kernel"]["ridge"]),
    )


def run_mc_study(cfg: dict) -> tuple[list[McRecord], list[tuple[int, str]]]:
    """All replicates; failures are collected, not silently dropped."""
    replicates = int(cfg["mc"]["replicates"])
    workers = effective_parallelism(cfg)
    records: list[McRecord] = []
    failures: list[tuple[int, str]] = []
    if workers > 1 and replicates > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {i: pool.submit(run_replicate, i, cfg) for i in range(replicates)}
            for i in range(replicates):
                try:
                    records.extend(futures[i].result())
                except Exception as exc:
                    failures.append((i, repr(exc)))
    else:
        for i in range(replicates):
            try:
                records.extend(run_replicate(i, cfg))
            except Exception as exc:
                failures.append((i, repr(exc)))
    max_frac = float(cfg["mc"]["max_failure_frac"])
    if failures and len(failures) > max_frac * replicates:
        detail = "; ".join(f"replicate {i}: {e}" for i, e in failures[:5])
        raise FtsbandError(
            f"{len(failures)}/{replicates} replicates failed: {detail}"
        )
    return records, failures


def aggregate_records(records: list[McRecord]) -> MetricTable:
    """Mean and standard error of coverage / amplitude / RMSE per
    (method, nominal level). Recomputable from the records CSV alone."""
    table = MetricTable()
    keys = sorted({(r.method, r.alpha) for r in records}, key=lambda x: (x[0], -x[1]))
    for method, alpha in keys:
        rows = [r for r in records if r.method == method and r.alpha == alpha]
        rows.sort(key=lambda r: r.replicate)
        stats = {}
        rmses = np.array([r.rmse for r in rows])
        stats["rmse_mean"] = float(rmses.mean())
        stats["rmse_se"] = float(rmses.std(ddof=1) / math.sqrt(len(rmses))) if len(rmses) > 1 else 0.0
        cov = [r.covered for r in rows if r.covered is not None]
        if cov:
            p = float(np.mean(cov))
            stats["coverage"] = p
            stats["coverage_se"] = float(math.sqrt(p * (1 - p) / len(cov)))
        amp = [r.amplitude for r in rows if r.amplitude is not None]
        if amp:
            amp = np.array(amp)
            stats["amplitude_mean"] = float(amp.mean())
            stats["amplitude_se"] = (
                float(amp.std(ddof=1) / math.sqrt(len(amp))) if len(amp) > 1 else 0.0
            )
        table.add(method, round(1.0 - alpha, 10), **stats)
    return table


def records_from_rows(rows: list[list[str]]) -> list[McRecord]:
    out = []
    for row in rows:
        rep, seed, method, alpha, covered, amplitude, rmse_v = row
        out.append(
            McRecord(
                replicate=int(rep),
                seed=int(seed),
                method=method,
                alpha=float(alpha),
                covered=None if covered == "" else bool(int(covered)),
                amplitude=None if amplitude == "" else float(amplitude),
                rmse=float(rmse_v),
            )
        )
    return out
