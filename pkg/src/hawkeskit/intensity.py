"""Model containers, conditional intensity and compensator evaluation.

Intensities are left limits: an arrival at ``t_i`` contributes to
``lambda*(t)`` only for ``t > t_i``. The right limit, which includes the jump
at ``t``, is available from :func:`intensity_after`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit

from .exceptions import NonIntegrableKernelError, NonStationaryError, ValidationError
from .kernel import (
    ExcitationKernel,
    ExpKernel,
    PowerLawKernel,
    _excite_unchecked,
    branching_ratio,
    integrated_kernel,
    kernel_from_dict,
    kernel_to_dict,
)


@dataclass(frozen=True, eq=False)
class EventSequence:
    """Strictly increasing arrival times observed on ``[0, horizon]``."""

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        times = np.array(self.times, dtype=float).reshape(-1)
        horizon = float(self.horizon)
        if not math.isfinite(horizon) or horizon < 0:
            raise ValidationError(f"horizon must be finite and >= 0, got {horizon}")
        if times.size:
            if not np.all(np.isfinite(times)):
                raise ValidationError("event times must be finite")
            if times[0] < 0:
                raise ValidationError(f"event time {times[0]} is negative")
            bad = np.flatnonzero(np.diff(times) <= 0)
            if bad.size:
                i = int(bad[0]) + 1
                raise ValidationError(
                    f"event times must be strictly increasing (index {i}: "
                    f"{times[i]!r} after {times[i - 1]!r})"
                )
            if times[-1] > horizon:
                raise ValidationError(f"event time {times[-1]} exceeds horizon {horizon}")
        times.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "horizon", horizon)

    def __len__(self):
        return self.times.size

    def __repr__(self):
        return f"EventSequence(k={self.times.size}, horizon={self.horizon})"

    def interarrivals(self) -> np.ndarray:
        """Gaps ``t_1 - 0, t_2 - t_1, ...``."""
        return np.diff(self.times, prepend=0.0)


@dataclass(frozen=True)
class HawkesModel:
    """Background rate plus excitation kernel.

    ``initial_intensity`` sets ``lambda*(0)`` for the exponential kernel; the
    intensity then carries an extra term ``(lambda0 - lambda) exp(-beta t)``.
    ``None`` means ``lambda0 = lambda``.
    """

    baseline: float
    kernel: ExcitationKernel
    initial_intensity: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.baseline) and self.baseline > 0):
            raise ValidationError(f"baseline must be finite and > 0, got {self.baseline}")
        if not isinstance(self.kernel, (ExpKernel, PowerLawKernel)):
            raise TypeError(f"unsupported kernel type {type(self.kernel).__name__}")
        if self.initial_intensity is not None:
            if not isinstance(self.kernel, ExpKernel):
                raise ValidationError("initial_intensity is only defined for the exponential kernel")
            if not (math.isfinite(self.initial_intensity) and self.initial_intensity > 0):
                raise ValidationError("initial_intensity must be finite and > 0")

    @property
    def branching_ratio(self) -> float:
        return branching_ratio(self.kernel)

    def is_stationary(self) -> bool:
        try:
            n = self.branching_ratio
        except NonIntegrableKernelError:
            return False
        return 0 < n < 1

    @property
    def initial_excess(self) -> float:
        """``lambda0 - lambda``; zero unless an initial intensity was set."""
        if self.initial_intensity is None:
            return 0.0
        return self.initial_intensity - self.baseline

    def to_dict(self) -> dict:
        out = {"lambda": self.baseline, **kernel_to_dict(self.kernel)}
        if self.initial_intensity is not None:
            out["lambda0"] = self.initial_intensity
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "HawkesModel":
        if "lambda" not in data:
            raise ValidationError("model parameter 'lambda' missing")
        lambda0 = data.get("lambda0")
        return cls(
            float(data["lambda"]),
            kernel_from_dict(data),
            None if lambda0 is None else float(lambda0),
        )


@dataclass(frozen=True, eq=False)
class MultivariateHawkesModel:
    """``m`` mutually exciting components with exponential cross-kernels.

    ``alphas[i, j]`` and ``betas[i, j]`` describe how an arrival in component
    ``j`` excites component ``i``.
    """

    baselines: np.ndarray
    alphas: np.ndarray
    betas: np.ndarray = field(repr=False)

    def __post_init__(self):
        lam = np.array(self.baselines, dtype=float).reshape(-1)
        a = np.array(self.alphas, dtype=float)
        b = np.array(self.betas, dtype=float)
        m = lam.size
        if m == 0:
            raise ValidationError("need at least one component")
        if a.shape != (m, m) or b.shape != (m, m):
            raise ValidationError(f"alphas and betas must have shape ({m}, {m})")
        if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
            raise ValidationError("all baselines must be finite and > 0")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ValidationError("all alphas must be finite and >= 0")
        if not np.all(np.isfinite(b)) or np.any(b <= 0):
            raise ValidationError("all betas must be finite and > 0")
        for arr in (lam, a, b):
            arr.setflags(write=False)
        object.__setattr__(self, "baselines", lam)
        object.__setattr__(self, "alphas", a)
        object.__setattr__(self, "betas", b)

    @property
    def dim(self) -> int:
        return self.baselines.size

    def branching_matrix(self) -> np.ndarray:
        return self.alphas / self.betas

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(np.linalg.eigvals(self.branching_matrix()))))

    def is_stable(self) -> bool:
        return self.spectral_radius() < 1

    def to_dict(self) -> dict:
        return {
            "baselines": self.baselines.tolist(),
            "alphas": self.alphas.tolist(),
            "betas": self.betas.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MultivariateHawkesModel":
        try:
            return cls(data["baselines"], data["alphas"], data["betas"])
        except KeyError as exc:
            raise ValidationError(f"multivariate parameter {exc.args[0]!r} missing") from None


@njit(cache=True)
def _decay_state_loop(times, beta):
    k = times.shape[0]
    out = np.zeros(k)
    for i in range(1, k):
        out[i] = math.exp(-beta * (times[i] - times[i - 1])) * (1.0 + out[i - 1])
    return out


def decay_state(events, beta: float) -> np.ndarray:
    """Recursive sums ``A(i) = sum_{j<i} exp(-beta (t_i - t_j))`` in one pass.

    ``A`` starts at zero for the first event and follows
    ``A(i) = exp(-beta (t_i - t_{i-1})) (1 + A(i-1))``.
    """
    times = _as_times(events)
    if times.size == 0:
        raise ValidationError("decay_state needs at least one event")
    return _decay_state_loop(times, float(beta))


def _as_times(events) -> np.ndarray:
    if isinstance(events, EventSequence):
        return events.times
    return np.ascontiguousarray(events, dtype=float).reshape(-1)


def _exp_excess_sum(times, beta, t, inclusive):
    """``sum exp(-beta (t - t_i))`` over ``t_i < t`` (or ``<=`` if inclusive), vectorised in t."""
    if times.size == 0:
        return np.zeros_like(t)
    a = _decay_state_loop(times, beta)
    side = "right" if inclusive else "left"
    j = np.searchsorted(times, t, side=side)  # events counted
    out = np.zeros_like(t)
    has = j > 0
    last = j[has] - 1
    out[has] = np.exp(-beta * (t[has] - times[last])) * (1.0 + a[last])
    return out


def _kernel_sum(model: HawkesModel, times, t, inclusive):
    kernel = model.kernel
    if isinstance(kernel, ExpKernel):
        total = kernel.alpha * _exp_excess_sum(times, kernel.beta, t, inclusive)
    else:
        total = np.zeros_like(t)
        side = "right" if inclusive else "left"
        counts = np.searchsorted(times, t, side=side)
        for idx, (tt, j) in enumerate(zip(t, counts)):
            if j:
                # a zero lag (inclusive right limit) evaluates to mu(0+)
                total[idx] = _excite_unchecked(kernel, tt - times[:j]).sum()
    if model.initial_excess:
        total = total + model.initial_excess * np.exp(-kernel.beta * t)
    return total


def _scalar_or_array(t, out):
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(np.shape(t))


def conditional_intensity(model: HawkesModel, events, t):
    """Left-limit intensity ``lambda + sum_{t_i < t} mu(t - t_i)``.

    ``t`` may be a scalar or an array of times.
    """
    times = _as_times(events)
    tt = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(tt < 0):
        raise ValidationError("intensity is defined for t >= 0")
    out = model.baseline + _kernel_sum(model, times, tt, inclusive=False)
    return _scalar_or_array(t, out)


def intensity_after(model: HawkesModel, events, t):
    """Right-limit intensity ``lambda*(t+)`` counting arrivals at ``t`` itself."""
    times = _as_times(events)
    tt = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(tt < 0):
        raise ValidationError("intensity is defined for t >= 0")
    out = model.baseline + _kernel_sum(model, times, tt, inclusive=True)
    return _scalar_or_array(t, out)


def intensity_at_events(model: HawkesModel, events) -> np.ndarray:
    """Left-limit intensities ``lambda*(t_i)`` at every arrival."""
    times = _as_times(events)
    if times.size == 0:
        return np.empty(0)
    kernel = model.kernel
    if isinstance(kernel, ExpKernel):
        vals = model.baseline + kernel.alpha * _decay_state_loop(times, kernel.beta)
        if model.initial_excess:
            vals = vals + model.initial_excess * np.exp(-kernel.beta * times)
        return vals
    return conditional_intensity(model, times, times)


def _compensator_unchecked(model: HawkesModel, times, t):
    kernel = model.kernel
    out = model.baseline * t
    if times.size:
        j = np.searchsorted(times, t, side="left")
        if isinstance(kernel, ExpKernel):
            # sum over t_i < t of (1 - e^{-beta (t - t_i)}) = j - S(t)
            s = _exp_excess_sum(times, kernel.beta, t, inclusive=False)
            out = out + (kernel.alpha / kernel.beta) * (j - s)
        else:
            extra = np.empty_like(t)
            for idx, (tt, jj) in enumerate(zip(t, j)):
                extra[idx] = np.sum(integrated_kernel(kernel, tt - times[:jj])) if jj else 0.0
            out = out + extra
    if model.initial_excess:
        out = out + model.initial_excess * -np.expm1(-kernel.beta * t) / kernel.beta
    return out


def compensator(model: HawkesModel, events, t):
    """Integrated intensity ``Lambda(t) = int_0^t lambda*(s) ds``.

    ``events`` is an :class:`EventSequence` and ``t`` must lie in
    ``[0, horizon]``; ``t`` may be an array.
    """
    if not isinstance(events, EventSequence):
        raise TypeError("compensator needs an EventSequence (its horizon bounds t)")
    tt = np.atleast_1d(np.asarray(t, dtype=float)).ravel()
    if np.any(tt < 0) or np.any(tt > events.horizon):
        raise ValidationError(f"t must lie in [0, {events.horizon}]")
    out = _compensator_unchecked(model, events.times, tt)
    return _scalar_or_array(t, out)


def compensator_at_events(model: HawkesModel, events) -> np.ndarray:
    """``Lambda(t_i)`` for every arrival, O(k) for the exponential kernel."""
    times = _as_times(events)
    if times.size == 0:
        return np.empty(0)
    kernel = model.kernel
    if isinstance(kernel, ExpKernel):
        a = _decay_state_loop(times, kernel.beta)
        out = model.baseline * times + (kernel.alpha / kernel.beta) * (np.arange(times.size) - a)
        if model.initial_excess:
            out = out + model.initial_excess * -np.expm1(-kernel.beta * times) / kernel.beta
        return out
    return _compensator_unchecked(model, times, times)


def mean_intensity(model: HawkesModel) -> float:
    """Stationary mean intensity ``lambda / (1 - n)``."""
    try:
        n = model.branching_ratio
    except NonIntegrableKernelError as exc:
        raise NonStationaryError(str(exc)) from None
    if n >= 1:
        raise NonStationaryError(f"branching ratio {n} >= 1: the process explodes")
    return model.baseline / (1.0 - n)


def multivariate_intensity(
    model: MultivariateHawkesModel, events: Sequence, i: int, t: float
) -> float:
    """Left-limit intensity of component ``i`` (zero-based) at time ``t``."""
    m = model.dim
    if not 0 <= i < m:
        raise IndexError(f"component index {i} out of range for m={m}")
    if len(events) != m:
        raise ValidationError(f"expected {m} event streams, got {len(events)}")
    total = model.baselines[i]
    for j, stream in enumerate(events):
        times = _as_times(stream)
        past = times[times < t]
        if past.size:
            total += model.alphas[i, j] * np.exp(-model.betas[i, j] * (t - past)).sum()
    return float(total)
