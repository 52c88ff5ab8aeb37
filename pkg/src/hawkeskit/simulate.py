"""Exact simulation of Hawkes processes on ``[0, horizon]``.

Three independent routes are provided: Ogata-style thinning, the
immigration-birth (cluster) construction and inversion of the compensator.
All take a ``numpy.random.Generator`` (or anything ``default_rng`` accepts)
so every run is reproducible from a seed.
"""

from __future__ import annotations

import math
from typing import Callable, List

import numpy as np

from .exceptions import BoundViolationError, ConvergenceError, NonStationaryError, ValidationError
from .intensity import (
    EventSequence,
    HawkesModel,
    MultivariateHawkesModel,
    _compensator_unchecked,
    _kernel_sum,
)
from .kernel import ExpKernel, NonIntegrableKernelError, offspring_density_sampler

THINNING_EPSILON = 1e-10
ALGORITHMS = ("thinning", "cluster", "inversion")


def _rng(rng) -> np.random.Generator:
    return np.random.default_rng(rng)


def _check_horizon(horizon):
    horizon = float(horizon)
    if not math.isfinite(horizon) or horizon < 0:
        raise ValidationError(f"horizon must be finite and >= 0, got {horizon}")
    return horizon


def poisson_by_thinning(
    horizon: float, rate_fn: Callable[[float], float], bound: float, rng=None
) -> EventSequence:
    """Inhomogeneous Poisson process with intensity ``rate_fn`` dominated by ``bound``.

    Raises :class:`BoundViolationError` as soon as a candidate time shows
    ``rate_fn(t) > bound``, since the sample would otherwise be biased.
    """
    horizon = _check_horizon(horizon)
    if not bound > 0:
        raise ValidationError(f"bound must be > 0, got {bound}")
    gen = _rng(rng)
    accepted = []
    t = 0.0
    while t < horizon:
        t += gen.exponential(1.0 / bound)
        u = gen.uniform(0.0, bound)
        if t < horizon:
            rate = rate_fn(t)
            if rate > bound:
                raise BoundViolationError(f"rate {rate} exceeds bound {bound} at t={t}")
            if u <= rate:
                accepted.append(t)
    return EventSequence(np.array(accepted), horizon)


def hawkes_by_thinning(
    horizon: float, model: HawkesModel, rng=None, epsilon: float = THINNING_EPSILON
) -> EventSequence:
    """Ogata's modified thinning with the bound refreshed to ``lambda*(t + epsilon)``.

    Valid because both kernel families are non-increasing between arrivals.
    """
    horizon = _check_horizon(horizon)
    gen = _rng(rng)
    if isinstance(model.kernel, ExpKernel):
        times = _thin_exp(horizon, model, gen, epsilon)
    else:
        times = _thin_generic(horizon, model, gen, epsilon)
    return EventSequence(np.array(times), horizon)


def _thin_exp(horizon, model, gen, epsilon):
    lam = model.baseline
    alpha, beta = model.kernel.alpha, model.kernel.beta
    # excess = lambda*(t) - lambda at time t, right limit; decays at rate beta
    excess = model.initial_excess
    t = 0.0
    times = []
    exponential, uniform = gen.exponential, gen.uniform
    while t < horizon:
        ahead = excess * math.exp(-beta * epsilon)
        # a negative excess (lambda0 < lambda) can only rise toward zero
        bound = lam + max(ahead, 0.0)
        step = exponential(1.0 / bound)
        t += step
        excess *= math.exp(-beta * step)
        u = uniform(0.0, bound)
        if t < horizon and u <= lam + excess:
            times.append(t)
            excess += alpha
    return times


def _thin_generic(horizon, model, gen, epsilon):
    t = 0.0
    times = []
    while t < horizon:
        hist = np.array(times)
        bound = model.baseline + _kernel_sum(model, hist, np.array([t + epsilon]), False)[0]
        t += gen.exponential(1.0 / bound)
        u = gen.uniform(0.0, bound)
        if t < horizon:
            if u <= model.baseline + _kernel_sum(model, hist, np.array([t]), False)[0]:
                times.append(t)
    return times


def hawkes_by_clusters(
    horizon: float, model: HawkesModel, rng=None, recursive: bool = True
) -> EventSequence:
    """Immigration-birth construction.

    Immigrants arrive as a Poisson(``lambda``) stream; every point then has
    ``Poi(n)`` children displaced by draws from ``mu / n``. With
    ``recursive=False`` only first-generation children are drawn, which is the
    single-level variant; it undercounts descendants and is kept for comparison.
    Being finite for any ``n``, that variant skips the stationarity check.
    """
    horizon = _check_horizon(horizon)
    try:
        n = model.branching_ratio
    except NonIntegrableKernelError as exc:
        raise NonStationaryError(str(exc)) from None
    if n >= 1 and recursive:
        raise NonStationaryError(
            f"branching ratio {n} >= 1: each immigrant has infinitely many descendants on average"
        )
    gen = _rng(rng)
    k = gen.poisson(model.baseline * horizon)
    immigrants = gen.uniform(0.0, horizon, size=k)

    excess0 = model.initial_excess
    if excess0 < 0:
        raise ValidationError("cluster simulation needs initial_intensity >= baseline")
    if excess0 > 0:
        # extra immigrants with intensity excess0 * exp(-beta t) on [0, horizon]
        beta = model.kernel.beta
        mass = -math.expm1(-beta * horizon)
        extra = gen.poisson(excess0 * mass / beta)
        u = gen.random(extra)
        immigrants = np.concatenate([immigrants, -np.log1p(-u * mass) / beta])

    points = [immigrants]
    parents = immigrants
    while parents.size and n > 0:
        counts = gen.poisson(n, size=parents.size)
        total = int(counts.sum())
        if total == 0:
            break
        children = np.repeat(parents, counts) + offspring_density_sampler(model.kernel, gen, total)
        # descendants of a point past the horizon are also past it
        children = children[children <= horizon]
        points.append(children)
        if not recursive:
            break
        parents = children
    return EventSequence(np.sort(np.concatenate(points)), horizon)


def hawkes_by_inversion(
    horizon: float,
    model: HawkesModel,
    rng=None,
    tol: float = 1e-12,
    max_iter: int = 100,
) -> EventSequence:
    """Compensator inversion: solve ``Lambda(t_{k+1}) - Lambda(t_k) = -log U`` per arrival.

    The exponential kernel uses its O(1) closed-form increment; the power law
    sums over the history. Roots are found by Newton's method kept inside a
    bisection bracket.
    """
    horizon = _check_horizon(horizon)
    gen = _rng(rng)
    if isinstance(model.kernel, ExpKernel):
        times = _invert_exp(horizon, model, gen, tol, max_iter)
    else:
        times = _invert_generic(horizon, model, gen, tol, max_iter)
    return EventSequence(np.array(times), horizon)


def _safeguarded_newton(g, dg, target, hi, s0, tol, max_iter):
    """Root of increasing ``g`` on ``(0, hi]`` with ``g(0) = -target < 0 <= g(hi)``."""
    lo = 0.0
    s = min(max(s0, 0.0), hi)
    scale = max(1.0, target)
    for _ in range(max_iter):
        val = g(s)
        if abs(val) <= tol * scale:
            return s
        if val < 0:
            lo = s
        else:
            hi = s
        slope = dg(s)
        nxt = s - val / slope if slope > 0 else lo - 1.0
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - s) <= 1e-15 * max(1.0, s):
            return nxt
        s = nxt
    raise ConvergenceError(f"compensator inversion did not converge in {max_iter} iterations")


def _invert_exp(horizon, model, gen, tol, max_iter):
    lam = model.baseline
    alpha, beta = model.kernel.alpha, model.kernel.beta
    excess = model.initial_excess  # right limit at the current time
    t = 0.0
    times = []
    while True:
        target = gen.standard_exponential()
        window = horizon - t
        e = excess

        def g(s):
            return lam * s - e * math.expm1(-beta * s) / beta - target

        def dg(s):
            return lam + e * math.exp(-beta * s)

        if window <= 0 or g(window) < 0:
            break
        s0 = target / (lam + max(e, 0.0))
        s = _safeguarded_newton(g, dg, target, window, s0, tol, max_iter)
        t_next = t + s
        if t_next <= t:
            # increment below float resolution at this magnitude
            t_next = math.nextafter(t, math.inf)
        t = t_next
        times.append(t)
        excess = e * math.exp(-beta * s) + alpha
    return times


def _invert_generic(horizon, model, gen, tol, max_iter):
    t = 0.0
    times = []
    while True:
        hist = np.array(times)
        target = gen.standard_exponential()
        window = horizon - t
        base = _compensator_unchecked(model, hist, np.array([t]))[0]

        def g(s):
            return _compensator_unchecked(model, hist, np.array([t + s]))[0] - base - target

        def dg(s):
            return model.baseline + _kernel_sum(model, hist, np.array([t + s]), True)[0]

        if window <= 0 or g(window) < 0:
            break
        s0 = target / dg(0.0)
        s = _safeguarded_newton(g, dg, target, window, s0, tol, max_iter)
        t = max(t + s, math.nextafter(t, math.inf))
        times.append(t)
    return times


def multivariate_by_thinning(
    horizon: float,
    model: MultivariateHawkesModel,
    rng=None,
    epsilon: float = THINNING_EPSILON,
) -> List[EventSequence]:
    """Thinning on the summed intensity, attributing each kept point to a component.

    A point kept at ``t`` goes to component ``i`` with probability
    ``lambda*_i(t) / sum_j lambda*_j(t)``.
    """
    horizon = _check_horizon(horizon)
    rho = model.spectral_radius()
    if rho >= 1:
        raise NonStationaryError(f"spectral radius {rho} of alpha/beta >= 1: unstable model")
    gen = _rng(rng)
    lam, alphas, betas = model.baselines, model.alphas, model.betas
    m = model.dim
    # state[i, j]: excitation of component i from past arrivals in j
    state = np.zeros((m, m))
    streams = [[] for _ in range(m)]
    t = 0.0
    while t < horizon:
        bound = lam.sum() + (state * np.exp(-betas * epsilon)).sum()
        step = gen.exponential(1.0 / bound)
        t += step
        state *= np.exp(-betas * step)
        u = gen.uniform(0.0, bound)
        if t < horizon:
            rates = lam + state.sum(axis=1)
            cum = np.cumsum(rates)
            if u <= cum[-1]:
                i = int(np.searchsorted(cum, u))
                streams[i].append(t)
                state[:, i] += alphas[:, i]
    return [EventSequence(np.array(s), horizon) for s in streams]


def simulate(model: HawkesModel, horizon: float, algo: str = "thinning", rng=None) -> EventSequence:
    """Dispatch to one of the three univariate simulators by name."""
    if algo == "thinning":
        return hawkes_by_thinning(horizon, model, rng)
    if algo == "cluster":
        return hawkes_by_clusters(horizon, model, rng)
    if algo == "inversion":
        return hawkes_by_inversion(horizon, model, rng)
    raise ValidationError(f"unknown algorithm {algo!r}; choose from {ALGORITHMS}")
