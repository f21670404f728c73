"""Simulation engine: reproducibility, laws, mixtures, censoring driver."""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from skewdiff import (DriftSpec, HorizonError, SimConfig, SimulationError,
                      TimeGrid, constant_skew_family, horizon_family,
                      mixture_probability, simulate,
                      simulate_bivariate_censoring, simulate_mixture,
                      sn_moments, SkewNormalParams)

ZERO_DRIFT = DriftSpec(kind="custom", mu_fn=lambda x, t: np.zeros_like(x))


def skew_drift(alpha=1.0, chirality=1):
    return DriftSpec(kind="constant_skew",
                     family=constant_skew_family(alpha, chirality))


class TestTimeGrid:
    def test_dt(self):
        g = TimeGrid(0.0, 1.0, 100, terminal_cutoff_epsilon=0.2)
        assert_allclose(g.dt, 0.008)
        assert len(g.times()) == 101
        assert_allclose(g.times()[-1], 0.8)

    def test_rejects_empty_interval(self):
        with pytest.raises(ValueError):
            TimeGrid(0.0, 1.0, 10, terminal_cutoff_epsilon=1.0)


class TestReproducibility:
    def test_bitwise_same_seed(self):
        grid = TimeGrid(0.0, 1.0, 100)
        cfg = SimConfig(n_paths=2000, seed=9, record_stride=20)
        a = simulate(skew_drift(), 0.0, grid, cfg)
        b = simulate(skew_drift(), 0.0, grid, cfg)
        assert np.array_equal(a.values, b.values)

    def test_bitwise_across_thread_counts(self):
        grid = TimeGrid(0.0, 0.5, 50)
        # force several blocks so scheduling could matter
        a = simulate(ZERO_DRIFT, 0.0, grid,
                     SimConfig(n_paths=20000, seed=3, record_stride=25, n_threads=1))
        b = simulate(ZERO_DRIFT, 0.0, grid,
                     SimConfig(n_paths=20000, seed=3, record_stride=25, n_threads=4))
        assert np.array_equal(a.values, b.values)

    def test_seed_changes_output(self):
        grid = TimeGrid(0.0, 0.5, 50)
        a = simulate(ZERO_DRIFT, 0.0, grid, SimConfig(n_paths=100, seed=1))
        b = simulate(ZERO_DRIFT, 0.0, grid, SimConfig(n_paths=100, seed=2))
        assert not np.array_equal(a.values, b.values)

    def test_initial_condition_column(self):
        grid = TimeGrid(0.0, 1.0, 40)
        ens = simulate(ZERO_DRIFT, 1.7, grid, SimConfig(n_paths=50, seed=5, record_stride=8))
        assert np.all(ens.values[:, 0] == 1.7)


class TestBrownianLaw:
    def test_terminal_moments(self):
        n = 40000
        t_end = 1.3
        ens = simulate(ZERO_DRIFT, 0.0, TimeGrid(0.0, t_end, 130),
                       SimConfig(n_paths=n, seed=11, record_stride=130))
        term = ens.values[:, -1]
        assert abs(term.mean()) < 3 * math.sqrt(t_end / n)
        assert abs(term.var(ddof=1) - t_end) < 3 * math.sqrt(2.0 / n) * t_end

    def test_halving_dt_within_mc_error(self):
        n = 100000
        coarse = simulate(ZERO_DRIFT, 0.0, TimeGrid(0.0, 1.0, 50),
                          SimConfig(n_paths=n, seed=21, record_stride=50))
        fine = simulate(ZERO_DRIFT, 0.0, TimeGrid(0.0, 1.0, 100),
                        SimConfig(n_paths=n, seed=22, record_stride=100))
        se_mean = math.sqrt(2.0 / n)
        tc, tf = coarse.values[:, -1], fine.values[:, -1]
        assert abs(tc.mean() - tf.mean()) < 3 * se_mean
        assert abs(tc.var(ddof=1) - tf.var(ddof=1)) < 3 * math.sqrt(2) * math.sqrt(2.0 / n)


class TestSkewLaw:
    def test_constant_skew_terminal_mean(self):
        n = 50000
        ens = simulate(skew_drift(1.0), 0.0, TimeGrid(0.0, 1.0, 500),
                       SimConfig(n_paths=n, seed=13, record_stride=500))
        mean, var, _ = sn_moments(SkewNormalParams(0.0, 1.0, 1.0))
        se = math.sqrt(var / n)
        assert abs(ens.values[:, -1].mean() - mean) < 3 * se

    def test_horizon_terminal_negative_fraction(self):
        T, eps = 1.0, 1e-4
        n = 20000
        drift = DriftSpec(kind="horizon", family=horizon_family(T, +1))
        ens = simulate(drift, 0.0, TimeGrid(0.0, T, 2000, terminal_cutoff_epsilon=eps),
                       SimConfig(n_paths=n, seed=17, record_stride=2000))
        assert np.mean(ens.values[:, -1] < 0) < 0.02


class TestSafeguards:
    def test_no_clamps_for_moderate_skew(self):
        ens = simulate(skew_drift(2.0), 0.0, TimeGrid(0.0, 1.0, 1000),
                       SimConfig(n_paths=2000, seed=19, drift_clamp=10.0,
                                 record_stride=1000))
        assert ens.clamp_events == 0

    def test_clamp_counting(self):
        stiff = DriftSpec(kind="custom", mu_fn=lambda x, t: np.full_like(x, 500.0))
        ens = simulate(stiff, 0.0, TimeGrid(0.0, 1.0, 10),
                       SimConfig(n_paths=7, seed=1, drift_clamp=1.0, record_stride=10))
        assert ens.clamp_events == 70
        # every increment clamped at 1.0 plus noise
        assert np.all(ens.values[:, -1] < 10.0 + 20.0)

    def test_nan_detection(self):
        bad = DriftSpec(kind="custom", mu_fn=lambda x, t: x * np.nan)
        with pytest.raises(SimulationError) as err:
            simulate(bad, 0.0, TimeGrid(0.0, 1.0, 10), SimConfig(n_paths=3, seed=1,
                                                                 record_stride=10))
        assert err.value.path_index is not None
        assert err.value.step_index is not None

    def test_horizon_guard(self):
        drift = DriftSpec(kind="horizon", family=horizon_family(1.0, +1))
        with pytest.raises(HorizonError):
            simulate(drift, 0.0, TimeGrid(0.0, 1.5, 100), SimConfig(n_paths=2, seed=1,
                                                                    record_stride=100))


class TestMirrorAndAntithetic:
    def test_mirror_law_exact_negation(self):
        grid = TimeGrid(0.0, 1.0, 200)
        plus = simulate(skew_drift(1.0, +1), 0.0, grid,
                        SimConfig(n_paths=500, seed=23, record_stride=40))
        minus = simulate(skew_drift(1.0, -1), 0.0, grid,
                         SimConfig(n_paths=500, seed=23, record_stride=40,
                                   flip_noise=True))
        assert np.array_equal(plus.values, -minus.values)

    def test_antithetic_pairs_negate_for_zero_drift(self):
        ens = simulate(ZERO_DRIFT, 0.0, TimeGrid(0.0, 1.0, 50),
                       SimConfig(n_paths=64, seed=29, antithetic=True,
                                 record_stride=10))
        assert np.array_equal(ens.values[0::2], -ens.values[1::2])

    def test_antithetic_needs_even_paths(self):
        with pytest.raises(ValueError):
            SimConfig(n_paths=7, seed=1, antithetic=True)


class TestBivariateCensoring:
    def test_identity_correlation_copies_paths(self):
        x, y = simulate_bivariate_censoring(1.0, TimeGrid(0.0, 1.0, 100),
                                            SimConfig(n_paths=200, seed=31,
                                                      record_stride=20))
        assert np.array_equal(x.values, y.values)

    def test_zero_correlation_independent(self):
        n = 50000
        x, y = simulate_bivariate_censoring(0.0, TimeGrid(0.0, 1.0, 200),
                                            SimConfig(n_paths=n, seed=37,
                                                      record_stride=200))
        xt, yt = x.values[:, -1], y.values[:, -1]
        corr = np.corrcoef(xt, yt)[0, 1]
        assert abs(corr) < 3.0 / math.sqrt(n)

    def test_ramp_correlation_variances(self):
        n = 50000
        T = 1.0
        x, y = simulate_bivariate_censoring(lambda t: math.sqrt(t / T),
                                            TimeGrid(0.0, T, 400),
                                            SimConfig(n_paths=n, seed=41,
                                                      record_stride=100))
        for j, t in enumerate(x.times):
            if t == 0:
                continue
            assert abs(x.values[:, j].var(ddof=1) - t) < 4 * math.sqrt(2.0 / n) * t
            assert abs(y.values[:, j].var(ddof=1) - t) < 4 * math.sqrt(2.0 / n) * t

    def test_rejects_bad_correlation(self):
        with pytest.raises(ValueError):
            simulate_bivariate_censoring(1.5, TimeGrid(0.0, 1.0, 10),
                                         SimConfig(n_paths=2, seed=1, record_stride=10))


class TestMixture:
    def test_degenerate_mixture_matches_plain(self):
        grid = TimeGrid(0.0, 1.0, 100)
        cfg = SimConfig(n_paths=300, seed=43, record_stride=20)
        mixed = simulate_mixture(skew_drift(1.0, +1), skew_drift(1.0, -1), 1.0,
                                 0.0, grid, cfg)
        plain = simulate(skew_drift(1.0, +1), 0.0, grid, cfg)
        assert np.array_equal(mixed.values, plain.values)
        assert np.all(mixed.labels == 1)

    def test_labels_recorded_and_distributed(self):
        grid = TimeGrid(0.0, 0.5, 50)
        ens = simulate_mixture(skew_drift(), skew_drift(1.0, -1), 0.25, 0.0, grid,
                               SimConfig(n_paths=20000, seed=47, record_stride=50))
        frac = np.mean(ens.labels > 0)
        assert abs(frac - 0.25) < 3 * math.sqrt(0.25 * 0.75 / 20000)

    def test_rejects_bad_probability(self):
        with pytest.raises(ValueError):
            simulate_mixture(skew_drift(), skew_drift(1.0, -1), 1.5, 0.0,
                             TimeGrid(0.0, 1.0, 10), SimConfig(n_paths=2, seed=1,
                                                               record_stride=10))


class TestMixtureProbability:
    def test_symmetric_at_origin(self):
        assert mixture_probability(0.0, 5.0) == (0.5, 0.5)

    def test_far_start(self):
        p_minus, p_plus = mixture_probability(100.0, 1.0)
        assert p_plus == 1.0
        assert p_minus == 0.0

    def test_one_sd_start(self):
        T = 4.0
        p_minus, p_plus = mixture_probability(math.sqrt(T), T)
        assert_allclose(p_plus, 0.8413447460685429, rtol=1e-13)
        assert_allclose(p_minus + p_plus, 1.0, rtol=0, atol=0)


class TestThreadCap:
    def test_env_variable_caps_workers(self, monkeypatch):
        from skewdiff.sde import thread_count
        monkeypatch.setenv("SKEWDIFF_THREADS", "2")
        assert thread_count() == 2
        assert thread_count(8) == 2
        assert thread_count(1) == 1
        monkeypatch.delenv("SKEWDIFF_THREADS")
        assert thread_count() == 1
        assert thread_count(6) == 6
