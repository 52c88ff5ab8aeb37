"""Residual analysis and Poissonity tests for fitted point-process models.

Arrivals are mapped through the fitted compensator; under a correct model the
images form a unit-rate Poisson process, which the tests below probe from
different angles. Every test is a deterministic function of its input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
from scipy.special import kolmogorov
from scipy.stats import norm

from .exceptions import ValidationError
from .intensity import EventSequence, HawkesModel, compensator, compensator_at_events


class KSResult(NamedTuple):
    statistic: float
    p_value: float


class AutocorrDiagnostics(NamedTuple):
    points: np.ndarray
    lag1_corr: float

    @property
    def degenerate(self) -> bool:
        return math.isnan(self.lag1_corr)


class ArcsineResult(NamedTuple):
    m_star: float
    accepted: bool
    quantile_bounds: Tuple[float, float]


class EndpointResult(NamedTuple):
    m1: float
    accepted: bool


def residual_transform(model: HawkesModel, events: EventSequence) -> EventSequence:
    """Map each arrival ``t_i`` to ``Lambda(t_i)``; the horizon becomes ``Lambda(T)``."""
    transformed = compensator_at_events(model, events)
    return EventSequence(transformed, compensator(model, events, events.horizon))


def _ks_statistic(cdf_values: np.ndarray) -> float:
    """Two-sided KS distance of a sample given its CDF values (any order)."""
    u = np.sort(cdf_values)
    n = u.size
    upper = np.arange(1, n + 1) / n - u
    lower = u - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def _ks_result(cdf_values) -> KSResult:
    d = _ks_statistic(cdf_values)
    p = float(kolmogorov(math.sqrt(cdf_values.size) * d))
    return KSResult(d, min(max(p, 0.0), 1.0))


def ks_exp_test(interarrivals) -> KSResult:
    """One-sample KS test of durations against ``Exp(1)``.

    The p-value uses the asymptotic Kolmogorov distribution of
    ``sqrt(n) * D``; it is reliable for roughly ``n >= 35``.
    """
    x = np.asarray(interarrivals, dtype=float).ravel()
    if x.size == 0:
        raise ValidationError("ks_exp_test needs at least one duration")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValidationError("durations must be finite and >= 0")
    return _ks_result(-np.expm1(-x))


def autocorr_diagnostics(transformed: EventSequence) -> AutocorrDiagnostics:
    """Successive-pair scatter ``(U_k, U_{k+1})`` with ``U_k = 1 - exp(-(t*_k - t*_{k-1}))``.

    ``lag1_corr`` is the Pearson correlation of the pairs, or NaN when either
    coordinate has zero variance.
    """
    t = transformed.times
    if t.size < 3:
        raise ValidationError("autocorrelation diagnostics need at least 3 points")
    u = -np.expm1(-np.diff(t))
    points = np.column_stack([u[:-1], u[1:]])
    x, y = points[:, 0], points[:, 1]
    sx, sy = x.std(), y.std()
    if sx == 0 or sy == 0 or x.size < 2:
        return AutocorrDiagnostics(points, math.nan)
    corr = float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))
    return AutocorrDiagnostics(points, corr)


def durbin_transform(u) -> np.ndarray:
    """Durbin's spacing transform of sorted uniform order statistics.

    The ``n + 1`` spacings are sorted, weighted by ``(n + 2 - i)`` times their
    successive differences and cumulated; under the null the first ``n``
    partial sums are again distributed as uniform order statistics.
    """
    u = np.sort(np.asarray(u, dtype=float))
    n = u.size
    spacings = np.sort(np.diff(np.concatenate([[0.0], u, [1.0]])))
    weights = np.arange(n + 1, 0, -1)
    g = weights * np.diff(spacings, prepend=0.0)
    return np.cumsum(g)[:n]


def lewis_test(transformed: EventSequence, durbin: bool = False) -> KSResult:
    """Conditional-uniformity test: ``t*_i / t*_k`` for ``i < k`` against ``U[0, 1]``.

    With ``durbin=True`` the ratios are passed through :func:`durbin_transform`
    before the KS comparison.
    """
    t = transformed.times
    if t.size < 2:
        raise ValidationError("lewis_test needs at least 2 points")
    ratios = t[:-1] / t[-1]
    if durbin:
        ratios = durbin_transform(ratios)
    return _ks_result(ratios)


def arcsine_quantiles(level: float) -> Tuple[float, float]:
    """``(level/2, 1 - level/2)`` quantiles of ``Beta(1/2, 1/2)`` via ``sin^2(pi p / 2)``."""
    lo, hi = level / 2, 1 - level / 2
    return math.sin(math.pi * lo / 2) ** 2, math.sin(math.pi * hi / 2) ** 2


def _check_level(level):
    if not 0 < level < 1:
        raise ValidationError(f"significance level must lie in (0, 1), got {level}")


def bm_path(events: EventSequence) -> np.ndarray:
    """Scaled path ``M(u) = (N(u) - u T) / sqrt(T)`` on ``[0, 1]``.

    Rows are ``(u, M(u))`` at ``u = 0``, after each jump, and at ``u = 1``.
    """
    T = events.horizon
    if T <= 0:
        raise ValidationError("horizon must be > 0")
    u = events.times / T
    counts = np.arange(1, u.size + 1)
    grid = np.concatenate([[0.0], u, [1.0]])
    level = np.concatenate([[0.0], (counts - u * T) / math.sqrt(T), [(u.size - T) / math.sqrt(T)]])
    return np.column_stack([grid, level])


def arcsine_test(events: EventSequence, level: float = 0.05) -> ArcsineResult:
    """Locate the maximiser of the scaled counting path and compare with arcsine quantiles.

    ``M`` only decreases between arrivals, so its maximum is attained at
    ``u = 0`` or right after one of the jumps.
    """
    _check_level(level)
    if len(events) == 0:
        raise ValidationError("arcsine_test needs at least one event")
    path = bm_path(events)[:-1]  # the value at u = 1 is a left limit, never the max
    m_star = float(path[int(np.argmax(path[:, 1])), 0])
    lo, hi = arcsine_quantiles(level)
    return ArcsineResult(m_star, bool(lo < m_star < hi), (lo, hi))


def endpoint_normal_test(events: EventSequence, level: float = 0.05) -> EndpointResult:
    """Accept when ``M(1) = (N - T) / sqrt(T)`` lies within the two-sided normal band."""
    _check_level(level)
    if len(events) == 0:
        raise ValidationError("endpoint_normal_test needs at least one event")
    T = events.horizon
    if T <= 0:
        raise ValidationError("horizon must be > 0")
    m1 = (len(events) - T) / math.sqrt(T)
    z = norm.ppf(1 - level / 2)
    return EndpointResult(float(m1), bool(-z <= m1 <= z))


def qq_points(interarrivals) -> np.ndarray:
    """Sorted durations against ``Exp(1)`` quantiles at plotting positions ``(i - 1/2) / n``."""
    x = np.sort(np.asarray(interarrivals, dtype=float))
    n = x.size
    theo = -np.log1p(-(np.arange(1, n + 1) - 0.5) / n)
    return np.column_stack([x, theo])


@dataclass
class GofReport:
    ks_exp: KSResult
    lewis: KSResult
    arcsine: ArcsineResult
    endpoint_normal: EndpointResult
    lag1_serial_corr: float
    qq_points: np.ndarray
    autocorr_points: np.ndarray
    level: float = 0.05

    def rejected(self) -> dict:
        """Which tests reject the unit-rate Poisson hypothesis at ``level``."""
        return {
            "ks_exp": self.ks_exp.p_value < self.level,
            "lewis": self.lewis.p_value < self.level,
            "arcsine": not self.arcsine.accepted,
            "endpoint_normal": not self.endpoint_normal.accepted,
        }

    def to_dict(self, include_points: bool = False) -> dict:
        corr = self.lag1_serial_corr
        out = {
            "level": self.level,
            "ks_exp": self.ks_exp._asdict(),
            "lewis": self.lewis._asdict(),
            "arcsine": {
                "m_star": self.arcsine.m_star,
                "accepted": self.arcsine.accepted,
                "quantile_bounds": list(self.arcsine.quantile_bounds),
            },
            "endpoint_normal": self.endpoint_normal._asdict(),
            "lag1_serial_corr": None if math.isnan(corr) else corr,
            "rejected": self.rejected(),
        }
        if include_points:
            out["qq_points"] = self.qq_points.tolist()
            out["autocorr_points"] = self.autocorr_points.tolist()
        return out


def goodness_of_fit(
    model: HawkesModel, events: EventSequence, level: float = 0.05, durbin: bool = False
) -> GofReport:
    """Run the full battery on the residual-transformed arrivals."""
    _check_level(level)
    transformed = residual_transform(model, events)
    gaps = transformed.interarrivals()
    if transformed.times.size >= 3:
        auto = autocorr_diagnostics(transformed)
    else:
        auto = AutocorrDiagnostics(np.empty((0, 2)), math.nan)
    return GofReport(
        ks_exp=ks_exp_test(gaps),
        lewis=lewis_test(transformed, durbin=durbin),
        arcsine=arcsine_test(transformed, level),
        endpoint_normal=endpoint_normal_test(transformed, level),
        lag1_serial_corr=auto.lag1_corr,
        qq_points=qq_points(gaps),
        autocorr_points=auto.points,
        level=level,
    )
