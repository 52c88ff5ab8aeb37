"""Hawkes process toolkit: simulation, likelihood fitting, residual diagnostics and spectra."""

from .estimate import FitResult, OptimizerConfig, fit_mle, log_likelihood_direct, log_likelihood_recursive
from .estimator import HawkesEstimator
from .exceptions import (
    BoundViolationError,
    ConvergenceError,
    HawkesError,
    NonIntegrableKernelError,
    NonStationaryError,
    ValidationError,
)
from .gof import (
    GofReport,
    arcsine_test,
    autocorr_diagnostics,
    endpoint_normal_test,
    goodness_of_fit,
    ks_exp_test,
    lewis_test,
    residual_transform,
)
from .intensity import (
    EventSequence,
    HawkesModel,
    MultivariateHawkesModel,
    compensator,
    conditional_intensity,
    decay_state,
    intensity_after,
    mean_intensity,
    multivariate_intensity,
)
from .kernel import ExpKernel, PowerLawKernel, branching_ratio, excite, offspring_density_sampler
from .simulate import (
    hawkes_by_clusters,
    hawkes_by_inversion,
    hawkes_by_thinning,
    multivariate_by_thinning,
    poisson_by_thinning,
    simulate,
)
from .spectral import (
    SpectralCurves,
    covariance_density,
    empirical_covariance_density,
    laplace_covariance,
    power_spectral_density,
)

__version__ = "0.1.0"
