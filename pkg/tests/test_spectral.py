import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from hawkeskit import (
    EventSequence,
    ExpKernel,
    HawkesModel,
    covariance_density,
    empirical_covariance_density,
    laplace_covariance,
    mean_intensity,
    power_spectral_density,
)
from hawkeskit.exceptions import NonStationaryError, ValidationError
from hawkeskit.spectral import spectral_curves

MODEL = HawkesModel(0.5, ExpKernel(2.0, 2.1))

stationary = st.builds(
    lambda lam, beta, n: HawkesModel(lam, ExpKernel(n * beta, beta)),
    st.floats(0.1, 5.0),
    st.floats(0.1, 10.0),
    st.floats(0.01, 0.95),
)


class TestCovarianceDensity:
    def test_example(self):
        taus = np.array([0.3, 1.0, 7.5])
        np.testing.assert_allclose(covariance_density(MODEL, taus), 231 * np.exp(-0.1 * taus), rtol=1e-12)
        assert covariance_density(MODEL, 1.0) == pytest.approx(209.016, abs=2e-3)

    def test_even(self):
        assert covariance_density(MODEL, -2.0) == covariance_density(MODEL, 2.0)

    def test_vanishes_without_excitation(self):
        assert covariance_density(HawkesModel(1.0, ExpKernel(0.0, 1.0)), 0.5) == 0.0
        assert covariance_density(HawkesModel(1.0, ExpKernel(1e-9, 1.0)), 0.5) < 1e-8

    def test_errors(self):
        with pytest.raises(ValidationError):
            covariance_density(MODEL, 0.0)
        with pytest.raises(NonStationaryError):
            covariance_density(HawkesModel(1.0, ExpKernel(2.0, 2.0)), 1.0)

    @given(stationary)
    def test_integral_matches_quadrature(self, model):
        lam, a, b = model.baseline, model.kernel.alpha, model.kernel.beta
        closed = a * b * lam * (2 * b - a) / (2 * (b - a) ** 3)
        quad = integrate.quad(lambda t: covariance_density(model, t), 0, np.inf, epsabs=0, epsrel=1e-12)[0]
        assert quad == pytest.approx(closed, rel=1e-8)

    @given(stationary)
    def test_log_linear(self, model):
        grid = np.linspace(0.1, 5.0, 40)
        values = covariance_density(model, grid)
        assert np.all(values > 0) and np.all(np.diff(values) < 0)
        slope = np.polyfit(grid, np.log(values), 1)[0]
        gap = model.kernel.beta - model.kernel.alpha
        assert -slope == pytest.approx(gap, rel=1e-10, abs=1e-10)


class TestPowerSpectralDensity:
    def test_examples(self):
        assert power_spectral_density(MODEL, 1e12) == pytest.approx(10.5 / (2 * math.pi), rel=1e-12)
        assert power_spectral_density(MODEL, 1e12) == pytest.approx(1.67113, abs=1e-5)
        assert power_spectral_density(MODEL, 0.0) == pytest.approx(10.5 / (2 * math.pi) * 441, rel=1e-12)
        assert power_spectral_density(MODEL, 0.0) == pytest.approx(736.97, abs=0.01)

    def test_one_sided(self):
        assert power_spectral_density(MODEL, 0.3, one_sided=True) == 2 * power_spectral_density(MODEL, 0.3)

    @given(stationary)
    def test_even_and_decreasing(self, model):
        grid = np.linspace(0, 50, 200)
        pos = power_spectral_density(model, grid)
        np.testing.assert_array_equal(pos, power_spectral_density(model, -grid))
        assert np.all(np.diff(pos) < 0)
        assert np.all(pos > mean_intensity(model) / (2 * math.pi))


class TestLaplace:
    def test_fixed_point_exact(self):
        lbar = mean_intensity(MODEL)
        assert laplace_covariance(MODEL, 2.1) == 2.0 * lbar / (2 * (2.1 - 2.0))
        # 2.1 - 2.0 is not exactly 0.1 in binary, so 105 holds to rounding only
        assert laplace_covariance(MODEL, 2.1) == pytest.approx(105.0, rel=1e-13)

    @given(stationary)
    def test_fixed_point_identity(self, model):
        a, b = model.kernel.alpha, model.kernel.beta
        expected = a * mean_intensity(model) / (2 * (b - a))
        assert laplace_covariance(model, b) == expected

    @given(stationary)
    def test_quadrature(self, model):
        quad = integrate.quad(
            lambda t: math.exp(-t) * covariance_density(model, t), 0, np.inf, epsabs=0, epsrel=1e-12
        )[0]
        assert laplace_covariance(model, 1.0) == pytest.approx(quad, rel=1e-8)

    def test_reproduces_spectral_density(self):
        omega = np.linspace(-5, 5, 41)
        lhs = 2 * np.real(laplace_covariance(MODEL, 1j * omega)) + mean_intensity(MODEL)
        np.testing.assert_allclose(lhs, 2 * math.pi * power_spectral_density(MODEL, omega), rtol=1e-12)

    def test_pole(self):
        with pytest.raises(ValidationError):
            laplace_covariance(MODEL, -0.2)


class TestEmpirical:
    def test_poisson_near_zero(self, rng):
        n = rng.poisson(2e5)
        ev = EventSequence(np.sort(rng.uniform(0, 1e5, n)), 1e5)
        est = empirical_covariance_density(ev, 0.1, 1.0)
        assert np.all(np.abs(est.covariance_values) < 3 * est.covariance_se + 1e-12) or (
            # one miss in ten lags is within chance at the 3 SE level
            np.sum(np.abs(est.covariance_values) >= 3 * est.covariance_se) <= 1
        )
        assert est.atom_weight == pytest.approx(2.0, rel=0.02)

    def test_lag_zero_excluded(self, rng):
        ev = EventSequence(np.sort(rng.uniform(0, 1000, 1000)), 1000.0)
        est = empirical_covariance_density(ev, 0.5, 2.0)
        np.testing.assert_allclose(est.lag_grid, [0.5, 1.0, 1.5, 2.0])

    def test_too_few_bins(self):
        with pytest.raises(ValidationError):
            empirical_covariance_density(EventSequence([1.0], 10.0), 1.0, 5.0)
        with pytest.raises(ValidationError):
            empirical_covariance_density(EventSequence([1.0], 10.0), 0.0, 5.0)


def test_spectral_curves():
    curves = spectral_curves(MODEL, [1.0, 2.0], [0.0])
    assert curves.atom_weight == pytest.approx(10.5)
    np.testing.assert_allclose(curves.covariance_values, covariance_density(MODEL, np.array([1.0, 2.0])))
