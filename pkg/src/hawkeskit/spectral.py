"""Second-order structure of the stationary exponential-kernel Hawkes process.

The complete covariance density is ``lbar * delta(tau) + R(tau)``. The Dirac
atom is carried as the scalar weight ``lbar`` (:attr:`SpectralCurves.atom_weight`)
and ``R`` is only ever evaluated at ``tau != 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import NonStationaryError, ValidationError
from .intensity import EventSequence, HawkesModel, mean_intensity
from .kernel import ExpKernel


def _exp_params(model: HawkesModel):
    if not isinstance(model.kernel, ExpKernel):
        raise ValidationError("closed-form spectra need an exponential kernel")
    alpha, beta = model.kernel.alpha, model.kernel.beta
    if not alpha < beta:
        raise NonStationaryError(f"need alpha < beta, got alpha={alpha}, beta={beta}")
    return model.baseline, alpha, beta


def covariance_density(model: HawkesModel, tau):
    """Smooth covariance density ``R(tau)`` for ``tau != 0`` (even in ``tau``)."""
    lam, alpha, beta = _exp_params(model)
    tau = np.abs(np.asarray(tau, dtype=float))
    if np.any(tau == 0):
        raise ValidationError("R has an atom at 0 and is not evaluated there")
    gap = beta - alpha
    amp = alpha * beta * lam * (2 * beta - alpha) / (2 * gap**2)
    out = amp * np.exp(-gap * tau)
    return float(out) if out.ndim == 0 else out


def power_spectral_density(model: HawkesModel, omega, one_sided: bool = False):
    """``S(omega)``, or ``S+(omega) = 2 S(omega)`` when ``one_sided`` is set."""
    lam, alpha, beta = _exp_params(model)
    omega = np.asarray(omega, dtype=float)
    gap = beta - alpha
    out = lam * beta / (2 * math.pi * gap) * (1 + alpha * (2 * beta - alpha) / (gap**2 + omega**2))
    if one_sided:
        out = 2 * out
    return float(out) if out.ndim == 0 else out


def laplace_covariance(model: HawkesModel, s):
    """Laplace transform of ``R``; ``s`` may be complex with ``Re(s) > -(beta - alpha)``."""
    lam, alpha, beta = _exp_params(model)
    gap = beta - alpha
    s_arr = np.asarray(s)
    if np.any(np.real(s_arr) <= -gap):
        raise ValidationError(f"transform only converges for Re(s) > {-gap}")
    lbar = mean_intensity(model)
    # 2 beta - alpha written as beta + gap so the s = beta case cancels exactly
    out = alpha * lbar / (2 * gap) * ((beta + gap) / (s_arr + gap))
    if out.ndim == 0:
        return complex(out) if np.iscomplexobj(out) else float(out)
    return out


@dataclass
class SpectralCurves:
    lag_grid: np.ndarray
    covariance_values: np.ndarray
    freq_grid: Optional[np.ndarray] = None
    psd_values: Optional[np.ndarray] = None
    atom_weight: Optional[float] = None
    covariance_se: Optional[np.ndarray] = None


def spectral_curves(model: HawkesModel, lags, freqs) -> SpectralCurves:
    """Closed-form ``R`` and ``S`` on the given grids."""
    lags = np.asarray(lags, dtype=float)
    freqs = np.asarray(freqs, dtype=float)
    return SpectralCurves(
        lag_grid=lags,
        covariance_values=covariance_density(model, lags),
        freq_grid=freqs,
        psd_values=power_spectral_density(model, freqs),
        atom_weight=mean_intensity(model),
    )


def empirical_covariance_density(
    events: EventSequence,
    bin_width: float,
    max_lag: float,
    burn_in: float = 0.0,
    n_blocks: int = 20,
) -> SpectralCurves:
    """Binned estimate of ``R`` at lags ``bin_width, 2 bin_width, ..., max_lag``.

    Counts in bins of width ``bin_width`` (after discarding ``[0, burn_in)``)
    give ``R(j h) ~ Cov(N_i, N_{i+j}) / h**2``. Lag 0 is skipped since it
    holds the atom. Standard errors come from batch means over ``n_blocks``
    contiguous blocks, which stays honest under the strong serial dependence
    of clustered counts. The atom weight is estimated by the mean rate.
    """
    if not bin_width > 0:
        raise ValidationError("bin_width must be > 0")
    start = float(burn_in)
    span = events.horizon - start
    n_bins = int(math.floor(span / bin_width))
    max_j = int(math.floor(max_lag / bin_width + 1e-9))
    if max_j < 1:
        raise ValidationError("max_lag must be at least one bin width")
    if n_bins < 10 * max_j or n_bins // n_blocks <= max_j:
        raise ValidationError("too few bins for the requested lags and blocks")
    edges = start + bin_width * np.arange(n_bins + 1)
    counts = np.histogram(events.times, bins=edges)[0].astype(float)
    centred = counts - counts.mean()

    block_len = n_bins // n_blocks
    lags = np.arange(1, max_j + 1)
    per_block = np.empty((n_blocks, lags.size))
    for b in range(n_blocks):
        seg = centred[b * block_len : (b + 1) * block_len]
        for idx, j in enumerate(lags):
            per_block[b, idx] = np.mean(seg[:-j] * seg[j:])
    per_block /= bin_width**2
    estimate = per_block.mean(axis=0)
    se = per_block.std(axis=0, ddof=1) / math.sqrt(n_blocks)
    return SpectralCurves(
        lag_grid=lags * bin_width,
        covariance_values=estimate,
        atom_weight=counts.mean() / bin_width,
        covariance_se=se,
    )
