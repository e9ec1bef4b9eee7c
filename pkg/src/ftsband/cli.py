"""Command-line interface.

Subcommands: simulate, fit, band, mc-study, real. Exit codes: 0 success,
1 I/O or parse error, 2 numeric/model error, 3 config error.
"""

import sys
from pathlib import Path

import click
import numpy as np

from . import arh, bands, bootstrap, evalkit, io, mcstudy, rkhs, simulator
from .config import load_config
from .errors import ConfigError, FtsbandError, InputError
from .evalkit import SplitSpec
from .rkhs import KernelSpec, RawCurveSeries

EXIT_IO = 1
EXIT_NUMERIC = 2
EXIT_CONFIG = 3


def _run(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except (InputError, OSError) as exc:
        click.echo(f"input error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except FtsbandError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_NUMERIC)


@click.group()
def main():
    """Functional time series forecasting with simultaneous predictive bands."""


def _config_options(fn):
    fn = click.option("--config", "-c", type=click.Path(exists=True), default=None,
                      help="TOML or JSON config file.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Override all seeds.")(fn)
    fn = click.option("--parallelism", type=int, default=None,
                      help="Worker count (0 = all cores).")(fn)
    return fn


def _load(config, seed, parallelism):
    overrides: dict = {}
    if seed is not None:
        overrides = {"bootstrap": {"seed": seed}, "sim": {"seed": seed},
                     "mc": {"base_seed": seed}}
    if parallelism is not None:
        overrides["parallelism"] = parallelism
    return load_config(config, overrides)


def _sim_spec(cfg, n=None, seed=None):
    sim = cfg["sim"]
    return simulator.ArhSimSpec(
        n=int(n if n is not None else sim["n"]),
        m=int(sim["m"]),
        m_prime=int(sim["m_prime"]),
        psi_diag=tuple(sim["psi_diag"]),
        gamma0_diag=tuple(sim["gamma0_diag"]),
        eps=float(sim["eps"]),
        seed=int(seed if seed is not None else sim["seed"]),
        burn_in=int(sim["burn_in"]),
    )


def _resolve_and_fit(series, cfg):
    sigma, d, gamma = mcstudy.resolve_hyperparams(series, cfg)
    rep = rkhs.represent_series(series, KernelSpec(sigma=sigma), gamma, d)
    model = arh.fit(rep, ridge=float(cfg["kernel"]["ridge"]))
    calibrated = cfg["kernel"]["sigma"] is None or cfg["kernel"]["d"] is None
    hyper = {"sigma": sigma, "d": d, "gamma": gamma, "calibrated": calibrated}
    return rep, model, hyper


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


@main.command()
@_config_options
@click.option("--out", "-o", type=click.Path(), default="series.csv")
def simulate(config, seed, parallelism, out):
    """Generate an ARH trajectory and write it as CSV."""
    cfg = _run(_load, config, seed, parallelism)

    def body():
        spec = _sim_spec(cfg)
        psi, gamma0 = simulator.assemble_operators(spec)
        gamma_eps = simulator.innovation_covariance(psi, gamma0)
        min_eig = float(np.linalg.eigvalsh(gamma_eps).min())
        click.echo(f"innovation covariance min eigenvalue: {min_eig:.6g} (compatible)")
        result = simulator.simulate(spec)
        io.write_curves_csv(out, result.series)
        click.echo(f"wrote {result.series.n} curves x {len(result.series.grid)} points to {out}")

    _run(body)


# ---------------------------------------------------------------------------
# fit
# ---------------------------------------------------------------------------


@main.command()
@_config_options
@click.argument("series_csv", type=click.Path(exists=True))
@click.option("--out", "-o", type=click.Path(), default="model.json")
def fit(config, seed, parallelism, series_csv, out):
    """Fit the RKHS-ARH model on a curve CSV and save it as JSON."""
    cfg = _run(_load, config, seed, parallelism)

    def body():
        series = io.read_curves_csv(series_csv)
        _, model, hyper = _resolve_and_fit(series, cfg)
        fingerprint = {
            "input_sha256": io.file_sha256(series_csv),
            "config_sha256": io.dict_sha256(cfg),
            "hyperparams": hyper,
        }
        arh.save_model(model, out, fingerprint=fingerprint)
        click.echo(f"wrote model (sigma={hyper['sigma']}, d={hyper['d']}, "
                   f"gamma={hyper['gamma']}) to {out}")

    _run(body)


# ---------------------------------------------------------------------------
# band
# ---------------------------------------------------------------------------


@main.command()
@_config_options
@click.argument("series_csv", type=click.Path(exists=True))
@click.option("--out-dir", "-o", type=click.Path(), default=".")
@click.option("--holdout-last", is_flag=True,
              help="Treat the last curve as held-out truth for coverage.")
@click.option("--save-ensemble", is_flag=True,
              help="Also write the bootstrap pseudo-replicates as CSV.")
def band(config, seed, parallelism, series_csv, out_dir, holdout_last, save_ensemble):
    """Bootstrap predictive bands for the next curve of a series."""
    cfg = _run(_load, config, seed, parallelism)

    def body():
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        full = io.read_curves_csv(series_csv)
        truth = None
        series = full
        if holdout_last:
            if full.n < 3:
                raise InputError("need at least 3 curves to hold one out")
            truth = full.curves[-1]
            series = RawCurveSeries(grid=full.grid, curves=full.curves[:-1])
        rep, model, hyper = _resolve_and_fit(series, cfg)
        boot = cfg["bootstrap"]
        spec = bootstrap.BootstrapSpec(
            B=int(boot["B"]), h=int(boot["h"]), seed=int(boot["seed"]),
            refit=bool(boot["refit"]),
        )
        ens = bootstrap.residual_bootstrap(rep, model, spec, raw_curves=series.curves)
        alphas = [float(a) for a in cfg["bands"]["alphas"]]
        band_set = mcstudy.build_band_set(ens, alphas, series.grid, cfg["bands"]["k"])
        t = series.grid.points
        report = {"B": spec.B, "h": spec.h, "seed": spec.seed, "refit": spec.refit,
                  "hyperparams": hyper, "alphas": {}}
        prev_amp = None
        for alpha in sorted(alphas, reverse=True):  # rising nominal coverage
            hull_band = band_set[alpha]["fpcb"]
            tag = f"{1 - alpha:.2f}".replace("0.", "")
            io.write_table_csv(
                out / f"band_{tag}.csv", ["t", "lower", "upper"],
                [[repr(float(ti)), repr(float(lo)), repr(float(up))]
                 for ti, lo, up in zip(t, hull_band.lower, hull_band.upper)],
            )
            if hull_band.hull is not None:
                io.write_table_csv(
                    out / f"hull_vertices_{tag}.csv", ["t", "y"],
                    [[repr(float(a)), repr(float(b))] for a, b in hull_band.hull.vertices],
                )
            entry = {"kind": hull_band.kind}
            rep_eval = bands.evaluate_band(
                hull_band, truth if truth is not None else hull_band.lower,
                series.grid, slack=cfg["bands"]["slack"],
            )
            entry["amplitude"] = rep_eval.amplitude
            if truth is not None:
                entry["covered"] = rep_eval.covered
            if prev_amp is not None and rep_eval.amplitude < prev_amp - 1e-9:
                raise FtsbandError("band nesting violated across alphas")
            prev_amp = rep_eval.amplitude
            report["alphas"][str(alpha)] = entry
        if save_ensemble:
            io.write_table_csv(
                out / "ensemble.csv", [f"t={float(ti)!r}" for ti in t],
                [[repr(float(v)) for v in row] for row in ens.replicates],
            )
            io.write_json(out / "ensemble.json", {
                "seed": spec.seed, "B": spec.B, "h": spec.h, "refit": spec.refit,
                "model_fingerprint": io.dict_sha256(arh.model_to_dict(model)),
            })
        report["fingerprint"] = {
            "input_sha256": io.file_sha256(series_csv),
            "config_sha256": io.dict_sha256(cfg),
        }
        io.write_json(out / "report.json", report)
        click.echo(f"wrote bands for alphas {alphas} to {out}")

    _run(body)


# ---------------------------------------------------------------------------
# mc-study
# ---------------------------------------------------------------------------


@main.command("mc-study")
@_config_options
@click.option("--out-dir", "-o", type=click.Path(), default=".")
def mc_study(config, seed, parallelism, out_dir):
    """Monte Carlo coverage and amplitude study on simulated data."""
    cfg = _run(_load, config, seed, parallelism)

    def body():
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        records, failures = mcstudy.run_mc_study(cfg)
        io.write_table_csv(
            out / "records.csv", mcstudy.RECORD_HEADER,
            [mcstudy.record_row(r) for r in records],
        )
        table = mcstudy.aggregate_records(records)
        (out / "table.csv").write_text("\n".join(table.to_csv_lines()) + "\n")
        (out / "table.txt").write_text(table.to_text() + "\n")
        if failures:
            io.write_json(out / "failures.json",
                          {"failures": [{"replicate": i, "error": e} for i, e in failures]})
            click.echo(f"{len(failures)} replicates failed (see failures.json)", err=True)
        click.echo(table.to_text())
        click.echo(f"wrote records and tables to {out}")

    _run(body)


# ---------------------------------------------------------------------------
# real-data pipeline
# ---------------------------------------------------------------------------


@main.command()
@_config_options
@click.argument("series_csv", type=click.Path(exists=True))
@click.option("--out-dir", "-o", type=click.Path(), default=".")
def real(config, seed, parallelism, series_csv, out_dir):
    """Rolling one-step forecasts and bands over a chronological test block."""
    cfg = _run(_load, config, seed, parallelism)

    def body():
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        series = io.read_curves_csv(series_csv)
        if cfg["real"]["sqrt_transform"]:
            if (series.curves < 0).any():
                raise InputError("sqrt transform requested but data has negatives")
            series = RawCurveSeries(grid=series.grid, curves=np.sqrt(series.curves))
        split = SplitSpec(
            train_frac=float(cfg["split"]["train_frac"]),
            valid_frac=float(cfg["split"]["valid_frac"]),
            test_frac=float(cfg["split"]["test_frac"]),
        )
        n_train, n_valid, n_test = split.counts(series.n)
        fit_block = RawCurveSeries(
            grid=series.grid, curves=series.curves[: n_train + n_valid]
        )
        rep, model, hyper = _resolve_and_fit(fit_block, cfg)
        basis = rep.basis
        boot = cfg["bootstrap"]
        alphas = [float(a) for a in cfg["bands"]["alphas"]]
        refit_per_step = bool(cfg["real"]["refit_per_step"])
        ridge = float(cfg["kernel"]["ridge"])

        horizon_rows = []
        plot_rows = []
        t = series.grid.points
        for step, j in enumerate(range(n_train + n_valid, series.n), start=1):
            hist_curves = series.curves[:j]
            hist = rkhs.represent_with_basis(hist_curves, basis)
            step_model = arh.fit(hist, ridge=ridge) if refit_per_step else model
            pred_c = arh.predict_next(step_model, hist.coeffs[-1])
            pred = rkhs.reconstruct_on_grid(pred_c, basis.eig, len(series.grid))
            truth = series.curves[j]
            step_rmse = evalkit.rmse(pred, truth)
            spec = bootstrap.BootstrapSpec(
                B=int(boot["B"]), h=int(boot["h"]),
                seed=int(boot["seed"]) + step, refit=bool(boot["refit"]),
            )
            ens = bootstrap.residual_bootstrap(
                hist, step_model, spec, raw_curves=hist_curves
            )
            band_set = mcstudy.build_band_set(ens, alphas, series.grid, cfg["bands"]["k"])
            for alpha in alphas:
                hull_band = band_set[alpha]["fpcb"]
                report = bands.evaluate_band(
                    hull_band, truth, series.grid, slack=cfg["bands"]["slack"]
                )
                horizon_rows.append([
                    step, alpha, report.kind, int(report.covered),
                    repr(report.amplitude), repr(step_rmse),
                ])
                for i, ti in enumerate(t):
                    plot_rows.append([
                        step, alpha, repr(float(ti)), repr(float(truth[i])),
                        repr(float(pred[i])), repr(float(hull_band.lower[i])),
                        repr(float(hull_band.upper[i])),
                    ])
        io.write_table_csv(
            out / "horizons.csv",
            ["horizon", "alpha", "kind", "covered", "amplitude", "rmse"],
            horizon_rows,
        )
        io.write_table_csv(
            out / "bands.csv",
            ["horizon", "alpha", "t", "truth", "prediction", "lower", "upper"],
            plot_rows,
        )
        summary = {"hyperparams": hyper, "n_train": n_train, "n_valid": n_valid,
                   "n_test": n_test, "alphas": {}}
        for alpha in alphas:
            rows = [r for r in horizon_rows if r[1] == alpha]
            summary["alphas"][str(alpha)] = {
                "coverage": float(np.mean([r[3] for r in rows])),
                "amplitude_mean": float(np.mean([float(r[4]) for r in rows])),
            }
        summary["rmse_mean"] = float(np.mean([float(r[5]) for r in horizon_rows]))
        io.write_json(out / "report.json", summary)
        click.echo(f"evaluated {n_test} test horizons; results in {out}")

    _run(body)


if __name__ == "__main__":
    main()
