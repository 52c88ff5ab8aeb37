"""scikit-learn style front end for the exponential-kernel Hawkes model."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .estimate import OptimizerConfig, fit_mle, log_likelihood_recursive
from .gof import goodness_of_fit, residual_transform
from .intensity import HawkesModel
from .kernel import ExpKernel
from .simulate import simulate
from .validation import check_events, check_rng


class HawkesEstimator(TransformerMixin, BaseEstimator):
    """Maximum-likelihood Hawkes fit with an exponential kernel.

    ``X`` is a 1-D array of strictly increasing arrival times (or an
    :class:`~hawkeskit.intensity.EventSequence`). Pass ``horizon`` to
    ``fit``/``score``/``transform`` when the observation window extends past
    the last arrival.

    ``transform`` returns the residual (compensator-transformed) times, which
    form a unit-rate Poisson process when the fitted model is right.

    Parameters
    ----------
    init : dict, optional
        Extra starting point ``{"lambda": ..., "alpha": ..., "beta": ...}``
        tried before the built-in start grid.
    xatol, fatol, maxiter
        Nelder-Mead stopping rules in log-parameter space.
    """

    def __init__(self, init=None, xatol=1e-7, fatol=1e-7, maxiter=3000):
        self.init = init
        self.xatol = xatol
        self.fatol = fatol
        self.maxiter = maxiter

    def fit(self, X, y=None, horizon=None):
        events = check_events(X, horizon)
        init = None
        if self.init is not None:
            init = HawkesModel(
                float(self.init["lambda"]),
                ExpKernel(float(self.init["alpha"]), float(self.init["beta"])),
            )
        config = OptimizerConfig(xatol=self.xatol, fatol=self.fatol, maxiter=self.maxiter)
        result = fit_mle(events, init=init, config=config)
        self.fit_result_ = result
        self.model_ = result.params
        self.baseline_ = result.params.baseline
        self.alpha_ = result.params.kernel.alpha
        self.beta_ = result.params.kernel.beta
        self.branching_ratio_ = result.branching_ratio
        self.log_likelihood_ = result.log_likelihood
        self.converged_ = result.converged
        self.n_iter_ = result.iterations
        self.horizon_ = events.horizon
        return self

    def score(self, X, y=None, horizon=None):
        """Log-likelihood of ``X`` under the fitted parameters."""
        check_is_fitted(self, "model_")
        return log_likelihood_recursive(self.model_, check_events(X, horizon))

    def transform(self, X, horizon=None):
        check_is_fitted(self, "model_")
        return residual_transform(self.model_, check_events(X, horizon)).times

    def fit_transform(self, X, y=None, horizon=None):
        return self.fit(X, horizon=horizon).transform(X, horizon=horizon)

    def goodness_of_fit(self, X, horizon=None, level=0.05):
        check_is_fitted(self, "model_")
        return goodness_of_fit(self.model_, check_events(X, horizon), level)

    def sample(self, horizon, algo="thinning", random_state=None):
        """Draw one path of the fitted process on ``[0, horizon]``."""
        check_is_fitted(self, "model_")
        return simulate(self.model_, horizon, algo, check_rng(random_state)).times

    def get_feature_names_out(self, input_features=None):
        return np.array(["compensator_time"], dtype=object)
