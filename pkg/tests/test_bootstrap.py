import numpy as np
import pytest
from numpy.testing import assert_allclose

from ftsband import arh, bootstrap, rkhs, simulator
from ftsband.arh import ResidualPool
from ftsband.bootstrap import BootstrapSpec
from ftsband.rkhs import KernelSpec, RawCurveSeries


def _fitted_setup(n=80, m=32, seed=0, sigma=100.0, gamma=1e-4, d=5):
    sim = simulator.simulate(simulator.ArhSimSpec(n=n, m=m, seed=seed))
    rep = rkhs.represent_series(sim.series, KernelSpec(sigma=sigma), gamma, d)
    model = arh.fit(rep)
    return sim, rep, model


class TestDegenerateAndDeterminism:
    def test_zero_pool_no_refit_collapses_to_point_prediction(self):
        _, rep, model = _fitted_setup()
        pool = ResidualPool(residuals=np.zeros((rep.n - 1, 32)), centered=True)
        ens = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=25, seed=1, refit=False), pool=pool
        )
        spread = np.abs(ens.replicates - ens.point_prediction).max()
        assert spread <= 1e-12

    def test_single_replicate_reproducible(self):
        _, rep, model = _fitted_setup()
        a = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=1, seed=9))
        b = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=1, seed=9))
        assert np.array_equal(a.replicates, b.replicates)

    def test_seed_determinism_full_ensemble(self):
        _, rep, model = _fitted_setup()
        a = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=16, seed=3))
        b = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=16, seed=3))
        assert np.array_equal(a.replicates, b.replicates)
        assert np.array_equal(a.replicate_coeffs, b.replicate_coeffs)

    def test_per_replicate_streams_are_schedule_free(self):
        # replicate b only consumes its own RNG stream, so a prefix of a
        # larger ensemble matches a smaller one (parallel == sequential)
        _, rep, model = _fitted_setup()
        small = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=6, seed=5))
        large = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=12, seed=5))
        assert np.array_equal(small.replicates, large.replicates[:6])


class TestReplicateLaw:
    def test_no_refit_mean_matches_point_prediction(self):
        # with refit off and h=1 each replicate is the point prediction plus
        # one resampled centered residual
        _, rep, model = _fitted_setup(n=120, seed=4)
        b = 1000
        ens = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=b, seed=7, refit=False)
        )
        pool_sd = ens.residual_pool.std(axis=0)
        gap = np.abs(ens.replicates.mean(axis=0) - ens.point_prediction)
        assert np.all(gap <= 3.0 * pool_sd / np.sqrt(b) + 1e-12)

    def test_no_refit_dispersion_zero_iff_pool_zero(self):
        _, rep, model = _fitted_setup()
        ens = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=40, seed=2, refit=False)
        )
        assert ens.replicates.std(axis=0).max() > 0

    def test_replicate_count_exact(self):
        _, rep, model = _fitted_setup()
        for b in (1, 7, 33):
            ens = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=b, seed=0))
            assert ens.replicates.shape == (b, 32)
            assert ens.replicate_coeffs.shape == (b, 5)

    def test_pool_permutation_leaves_moments_alone(self):
        _, rep, model = _fitted_setup(n=100, seed=8)
        _, pool = arh.fitted_and_residuals(model, rep)
        b = 800
        base = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=b, seed=11, refit=False), pool=pool
        )
        rng = np.random.default_rng(0)
        perm = rng.permutation(pool.residuals.shape[0])
        shuffled = ResidualPool(residuals=pool.residuals[perm], centered=True)
        other = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=b, seed=12, refit=False), pool=shuffled
        )
        se = base.replicates.std(axis=0) / np.sqrt(b)
        assert np.all(np.abs(base.replicates.mean(axis=0) - other.replicates.mean(axis=0))
                      <= 3 * se + 1e-12)
        var_se = base.replicates.var(axis=0) * np.sqrt(2.0 / (b - 1))
        assert np.all(np.abs(base.replicates.var(axis=0) - other.replicates.var(axis=0))
                      <= 3 * var_se + 1e-12)

    def test_refit_changes_dispersion_but_not_center_much(self):
        _, rep, model = _fitted_setup(n=120, seed=4)
        no_refit = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=200, seed=7, refit=False)
        )
        refit = bootstrap.residual_bootstrap(
            rep, model, BootstrapSpec(B=200, seed=7, refit=True)
        )
        # the refitted ensemble carries extra estimation noise
        assert refit.replicates.std(axis=0).mean() >= no_refit.replicates.std(axis=0).mean() * 0.9
        assert np.array_equal(refit.point_prediction, no_refit.point_prediction)

    def test_horizon_two_runs(self):
        _, rep, model = _fitted_setup()
        ens = bootstrap.residual_bootstrap(rep, model, BootstrapSpec(B=10, h=2, seed=1))
        assert ens.replicates.shape == (10, 32)
        assert np.isfinite(ens.replicates).all()


class TestProjectReplicates:
    def test_training_curve_round_trips(self):
        sim, rep, model = _fitted_setup()
        # anchors are the recovered raw curves, so project the raw curve
        coeffs = bootstrap.project_replicates(sim.series.curves[:1], rep.basis)
        assert np.abs(coeffs[0] - rep.coeffs[0]).max() <= 1e-10

    def test_zero_curve(self):
        _, rep, _ = _fitted_setup()
        coeffs = bootstrap.project_replicates(np.zeros((1, 32)), rep.basis)
        assert_allclose(coeffs, np.zeros((1, 5)), atol=1e-15)

    def test_batch_matches_per_curve(self):
        rng = np.random.default_rng(19)
        _, rep, _ = _fitted_setup()
        curves = rng.standard_normal((100, 32))
        batch = bootstrap.project_replicates(curves, rep.basis)
        for i in range(0, 100, 17):
            single = bootstrap.project_replicates(curves[i : i + 1], rep.basis)
            assert_allclose(batch[i], single[0], atol=1e-12)


def test_spec_validation():
    with pytest.raises(ValueError):
        BootstrapSpec(B=0)
    with pytest.raises(ValueError):
        BootstrapSpec(h=0)


def test_raw_curve_recovery_identity():
    # default anchors reconstruct the raw input through z = gamma*a + K a
    sim, rep, model = _fitted_setup()
    recovered = rep.smoothed + rep.basis.gamma * rep.ridge_weights
    assert np.abs(recovered - sim.series.curves).max() <= 1e-8
