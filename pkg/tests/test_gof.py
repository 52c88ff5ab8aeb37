import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from strategies import event_sequences, models

from hawkeskit import (
    EventSequence,
    ExpKernel,
    HawkesModel,
    arcsine_test,
    autocorr_diagnostics,
    compensator,
    endpoint_normal_test,
    goodness_of_fit,
    hawkes_by_thinning,
    ks_exp_test,
    lewis_test,
    residual_transform,
)
from hawkeskit.exceptions import ValidationError
from hawkeskit.gof import arcsine_quantiles, bm_path, durbin_transform, qq_points


def unit_poisson(rng, horizon):
    n = rng.poisson(horizon)
    return EventSequence(np.sort(rng.uniform(0, horizon, n)), horizon)


class TestResidualTransform:
    def test_poisson_is_linear(self):
        ev = EventSequence([0.5, 1.25, 3.0], 4.0)
        out = residual_transform(HawkesModel(2.0, ExpKernel(0.0, 1.0)), ev)
        np.testing.assert_array_equal(out.times, 2 * ev.times)
        assert out.horizon == 8.0

    @given(models, event_sequences())
    def test_horizon_and_monotonicity(self, model, events):
        out = residual_transform(model, events)
        assert out.horizon == compensator(model, events, events.horizon)
        assert np.all(np.diff(out.times) > 0)
        assert len(out) == len(events)


class TestKS:
    @given(st.lists(st.floats(0.0, 50.0), min_size=1, max_size=200))
    def test_matches_scipy(self, data):
        res = ks_exp_test(data)
        ref = stats.kstest(data, "expon")
        assert 0.0 <= res.statistic <= 1.0
        assert res.statistic == pytest.approx(ref.statistic, abs=1e-12)
        assert res.p_value == pytest.approx(stats.kstwobign.sf(math.sqrt(len(data)) * ref.statistic), abs=1e-12)

    def test_equal_durations(self):
        assert ks_exp_test(np.ones(1000)).p_value < 1e-10

    def test_calibration_band(self):
        gens = [np.random.default_rng(s) for s in np.random.SeedSequence(31).spawn(1000)]
        rejected = np.mean([ks_exp_test(g.exponential(1.0, 10**4)).p_value < 0.05 for g in gens])
        assert 0.035 <= rejected <= 0.065

    @pytest.mark.parametrize("bad", [[], [-1.0], [math.inf]])
    def test_invalid(self, bad):
        with pytest.raises(ValidationError):
            ks_exp_test(bad)


class TestAutocorr:
    def test_poisson_bound(self, rng):
        ev = unit_poisson(rng, 5000.0)
        diag = autocorr_diagnostics(ev)
        assert abs(diag.lag1_corr) < 3 / math.sqrt(len(ev))
        assert diag.points.shape == (len(ev) - 2, 2)

    def test_periodic_is_degenerate(self):
        diag = autocorr_diagnostics(EventSequence(np.arange(1.0, 51.0), 50.0))
        assert diag.degenerate
        assert math.isnan(diag.lag1_corr)

    def test_pairs_against_numpy(self, rng):
        ev = unit_poisson(rng, 300.0)
        diag = autocorr_diagnostics(ev)
        u = 1 - np.exp(-np.diff(ev.times))
        np.testing.assert_allclose(diag.points[:, 0], u[:-1])
        assert diag.lag1_corr == pytest.approx(np.corrcoef(u[:-1], u[1:])[0, 1], rel=1e-10)

    def test_too_few(self):
        with pytest.raises(ValidationError):
            autocorr_diagnostics(EventSequence([1.0, 2.0], 3.0))


class TestLewis:
    def test_two_points(self):
        res = lewis_test(EventSequence([1.0, 4.0], 5.0))
        # single ratio 0.25 against U[0, 1]
        assert res.statistic == pytest.approx(0.75)

    def test_too_few(self):
        with pytest.raises(ValidationError):
            lewis_test(EventSequence([1.0], 5.0))

    def test_equally_spaced_detected_by_durbin_stage(self):
        ev = EventSequence(np.arange(1.0, 1001.0), 1000.0)
        assert lewis_test(ev, durbin=True).p_value < 1e-10

    def test_equally_spaced_look_uniform_without_durbin(self):
        # ratios i/k are over-regular, which KS alone cannot flag
        ev = EventSequence(np.arange(1.0, 1001.0), 1000.0)
        assert lewis_test(ev).p_value > 0.5

    def test_durbin_preserves_uniform_order_statistics(self):
        gens = [np.random.default_rng(s) for s in np.random.SeedSequence(32).spawn(4000)]
        # marginal of the third of 9 transformed points is Beta(3, 7)
        third = [durbin_transform(g.uniform(size=9))[2] for g in gens]
        assert stats.kstest(third, stats.beta(3, 7).cdf).pvalue > 0.01

    def test_durbin_output_sorted_in_unit_interval(self, rng):
        out = durbin_transform(rng.uniform(size=50))
        assert np.all(np.diff(out) >= 0)
        assert 0 <= out[0] and out[-1] <= 1 + 1e-12

    def test_calibration_band(self):
        gens = [np.random.default_rng(s) for s in np.random.SeedSequence(33).spawn(1000)]
        rejected = np.mean([lewis_test(unit_poisson(g, 1000.0)).p_value < 0.05 for g in gens])
        assert 0.035 <= rejected <= 0.065


class TestArcsine:
    def test_quantiles_match_beta(self):
        lo, hi = arcsine_quantiles(0.05)
        assert lo == pytest.approx(stats.beta(0.5, 0.5).ppf(0.025), rel=1e-10)
        assert hi == pytest.approx(stats.beta(0.5, 0.5).ppf(0.975), rel=1e-10)
        assert lo == pytest.approx(0.00154, abs=1e-5) and hi == pytest.approx(0.99846, abs=1e-5)

    @settings(max_examples=50)
    @given(event_sequences(max_size=50))
    def test_argmax_matches_dense_grid(self, events):
        if len(events) == 0:
            return
        res = arcsine_test(events)
        T = events.horizon
        t = np.concatenate([[0.0], events.times, events.times + 1e-12])
        t = t[t < T]
        levels = (np.searchsorted(events.times, t, side="right") - t) / math.sqrt(T)
        assert res.m_star == pytest.approx(t[int(np.argmax(levels))] / T, abs=1e-9)
        # the maximiser sits at 0 or at an arrival
        assert res.m_star == 0.0 or np.any(np.isclose(events.times / T, res.m_star, rtol=0, atol=1e-15))
        assert 0.0 <= res.m_star <= 1.0

    def test_accelerating_arrivals_rejected(self):
        # rate grows linearly: N(u) lags uT early, overtakes late
        T = 1000.0
        times = T * np.sqrt(np.linspace(0, 1, 1001)[1:])
        assert not arcsine_test(EventSequence(times, T)).accepted

    def test_bm_path_shape(self):
        path = bm_path(EventSequence([1.0, 3.0], 4.0))
        np.testing.assert_allclose(path[:, 0], [0, 0.25, 0.75, 1.0])
        np.testing.assert_allclose(path[:, 1], [0, 0.0, -0.5, -1.0])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            arcsine_test(EventSequence([], 4.0))
        with pytest.raises(ValidationError):
            arcsine_test(EventSequence([1.0], 4.0), level=1.5)


class TestEndpoint:
    def test_centered(self):
        res = endpoint_normal_test(EventSequence(np.arange(1.0, 101.0), 100.0), level=0.999)
        assert res.m1 == 0.0 and res.accepted

    def test_doubled_rate(self, rng):
        ev = unit_poisson(rng, 200.0)
        doubled = EventSequence(ev.times / 2, 100.0)
        res = endpoint_normal_test(doubled)
        assert res.m1 == pytest.approx(10.0, abs=3.0)
        assert not res.accepted


def test_qq_points():
    pts = qq_points([2.0, 0.5])
    np.testing.assert_allclose(pts, [[0.5, -math.log(0.75)], [2.0, -math.log(0.25)]])


class TestReport:
    @pytest.fixture
    def report(self):
        model = HawkesModel(0.5, ExpKernel(2.0, 2.1))
        ev = hawkes_by_thinning(300.0, model, np.random.default_rng(77))
        return model, ev, goodness_of_fit(model, ev)

    def test_invariants(self, report):
        _, ev, rep = report
        assert 0 <= rep.ks_exp.p_value <= 1 and 0 <= rep.lewis.p_value <= 1
        assert 0 <= rep.arcsine.m_star <= 1
        assert np.all(np.isfinite(rep.qq_points)) and np.all(np.isfinite(rep.autocorr_points))
        assert rep.qq_points.shape == (len(ev), 2)

    def test_deterministic(self, report):
        model, ev, rep = report
        assert goodness_of_fit(model, ev).to_dict(include_points=True) == rep.to_dict(include_points=True)

    def test_to_dict(self, report):
        d = report[2].to_dict()
        assert set(d["rejected"]) == {"ks_exp", "lewis", "arcsine", "endpoint_normal"}
        assert "qq_points" not in d

    def test_true_model_passes(self, report):
        assert not any(report[2].rejected().values())

    def test_poisson_model_rejected(self, report):
        _, ev, _ = report
        poisson = HawkesModel(len(ev) / ev.horizon, ExpKernel(0.0, 1.0))
        assert goodness_of_fit(poisson, ev).rejected()["ks_exp"]
