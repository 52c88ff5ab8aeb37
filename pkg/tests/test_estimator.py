import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hawkeskit import EventSequence, ExpKernel, HawkesEstimator, HawkesModel, hawkes_by_thinning
from hawkeskit.exceptions import ValidationError
from hawkeskit.validation import check_events

MODEL = HawkesModel(0.5, ExpKernel(2.0, 2.1))


@pytest.fixture(scope="module")
def path():
    return hawkes_by_thinning(300.0, MODEL, np.random.default_rng(4))


@pytest.fixture(scope="module")
def fitted(path):
    return HawkesEstimator().fit(path.times, horizon=path.horizon)


def test_params_and_clone():
    est = HawkesEstimator(xatol=1e-6, maxiter=100)
    assert est.get_params() == {"init": None, "xatol": 1e-6, "fatol": 1e-7, "maxiter": 100}
    other = clone(est)
    assert other.get_params() == est.get_params()
    est.set_params(maxiter=50)
    assert est.maxiter == 50


def test_not_fitted(path):
    with pytest.raises(NotFittedError):
        HawkesEstimator().transform(path.times)


def test_fitted_attributes(fitted, path):
    assert fitted.horizon_ == 300.0
    assert fitted.branching_ratio_ == pytest.approx(fitted.alpha_ / fitted.beta_)
    assert fitted.converged_
    assert fitted.score(path.times, horizon=300.0) == pytest.approx(fitted.log_likelihood_)


def test_accepts_sequences_and_columns(fitted, path):
    a = fitted.transform(path)
    b = fitted.transform(path.times.reshape(-1, 1), horizon=300.0)
    np.testing.assert_array_equal(a, b)
    assert np.all(np.diff(a) > 0)


def test_fit_transform(path):
    out = HawkesEstimator().fit_transform(path.times, horizon=300.0)
    assert out.shape == (len(path),)


def test_goodness_of_fit_and_sample(fitted, path):
    report = fitted.goodness_of_fit(path)
    assert 0 <= report.ks_exp.p_value <= 1
    a = fitted.sample(20.0, random_state=1)
    b = fitted.sample(20.0, random_state=1)
    np.testing.assert_array_equal(a, b)
    assert list(fitted.get_feature_names_out()) == ["compensator_time"]


def test_init_parameter(path):
    est = HawkesEstimator(init={"lambda": 0.5, "alpha": 2.0, "beta": 2.1}).fit(path)
    assert est.fit_result_.restarts_used == 9


def test_check_events():
    assert check_events([1.0, 2.0]).horizon == 2.0
    with pytest.raises(ValidationError):
        check_events([])
    assert check_events([], horizon=3.0).horizon == 3.0
    with pytest.raises(ValidationError):
        check_events(np.ones((3, 2)))
    with pytest.raises(ValidationError):
        check_events([2.0, 1.0])
    ev = EventSequence([1.0], 2.0)
    assert check_events(ev) is ev
    assert check_events(ev, horizon=5.0).horizon == 5.0
