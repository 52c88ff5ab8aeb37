"""Excitation kernels: the response of the intensity to a single past arrival.

Two closed families are supported, exponential ``alpha * exp(-beta * s)`` and
the Omori power law ``k / (c + s) ** p``. Both are non-increasing on
``(0, inf)``, which the thinning simulator relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import NonIntegrableKernelError, ValidationError


@dataclass(frozen=True)
class ExpKernel:
    """Exponential kernel ``alpha * exp(-beta * s)``.

    Parameters
    ----------
    alpha : float
        Jump in intensity caused by each arrival (events per unit time).
    beta : float
        Decay rate of that jump (per unit time).
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValidationError(f"alpha must be finite and >= 0, got {self.alpha}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValidationError(f"beta must be finite and > 0, got {self.beta}")


@dataclass(frozen=True)
class PowerLawKernel:
    """Power-law (Omori) kernel ``k / (c + s) ** p``."""

    k: float
    c: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ValidationError(f"k must be finite and >= 0, got {self.k}")
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"c must be finite and > 0, got {self.c}")
        if not (math.isfinite(self.p) and self.p > 0):
            raise ValidationError(f"p must be finite and > 0, got {self.p}")


ExcitationKernel = Union[ExpKernel, PowerLawKernel]


def _check_kernel(kernel):
    if not isinstance(kernel, (ExpKernel, PowerLawKernel)):
        raise TypeError(f"unsupported kernel type {type(kernel).__name__}")


def excite(kernel: ExcitationKernel, s):
    """Evaluate the kernel at elapsed time ``s > 0``.

    Accepts a scalar or an array; arrays are evaluated elementwise.
    """
    _check_kernel(kernel)
    s_arr = np.asarray(s, dtype=float)
    if np.any(~(s_arr > 0)):
        raise ValidationError("kernel is defined on (0, inf); got elapsed time <= 0")
    out = _excite_unchecked(kernel, s_arr)
    return float(out) if out.ndim == 0 else out


def _excite_unchecked(kernel, s):
    if isinstance(kernel, ExpKernel):
        return kernel.alpha * np.exp(-kernel.beta * s)
    return kernel.k / (kernel.c + s) ** kernel.p


def jump_size(kernel: ExcitationKernel) -> float:
    """Right limit ``mu(0+)``: the instantaneous intensity increase per arrival."""
    _check_kernel(kernel)
    if isinstance(kernel, ExpKernel):
        return kernel.alpha
    return kernel.k / kernel.c**kernel.p


def integrated_kernel(kernel: ExcitationKernel, s):
    """Closed-form ``int_0^s mu(u) du`` for ``s >= 0`` (zero for ``s <= 0``)."""
    _check_kernel(kernel)
    s = np.maximum(np.asarray(s, dtype=float), 0.0)
    if isinstance(kernel, ExpKernel):
        out = (kernel.alpha / kernel.beta) * -np.expm1(-kernel.beta * s)
    else:
        k, c, p = kernel.k, kernel.c, kernel.p
        if p == 1.0:
            out = k * np.log1p(s / c)
        else:
            # k c^(1-p) / (p-1) * (1 - (c/(c+s))^(p-1)), stable for p near 1
            out = k * c ** (1 - p) * -np.expm1((p - 1) * -np.log1p(s / c)) / (p - 1)
    return float(out) if out.ndim == 0 else out


def branching_ratio(kernel: ExcitationKernel) -> float:
    """Expected number of direct offspring per arrival, ``int_0^inf mu(s) ds``."""
    _check_kernel(kernel)
    if isinstance(kernel, ExpKernel):
        return kernel.alpha / kernel.beta
    if kernel.p == 1.0:
        raise NonIntegrableKernelError(
            "power-law kernel with p == 1 has a logarithmically divergent integral"
        )
    if kernel.p < 1.0:
        raise NonIntegrableKernelError(
            f"power-law kernel with p = {kernel.p} < 1 is not integrable"
        )
    return kernel.k * kernel.c ** (1 - kernel.p) / (kernel.p - 1)


def offspring_density_sampler(kernel: ExcitationKernel, rng: np.random.Generator, size=None):
    """Draw elapsed times from the normalised kernel density ``mu(s) / n``.

    The exponential kernel reduces to ``Exp(beta)``. The power law is drawn by
    inverting its CDF ``1 - (c / (c + s)) ** (p - 1)``.
    """
    n = branching_ratio(kernel)
    if n <= 0:
        raise NonIntegrableKernelError("offspring density undefined for a zero kernel")
    if isinstance(kernel, ExpKernel):
        return rng.exponential(1.0 / kernel.beta, size=size)
    u = rng.random(size=size)
    # 1 - u lies in (0, 1], keeping draws finite
    return kernel.c * np.expm1(-np.log1p(-u) / (kernel.p - 1))


def kernel_to_dict(kernel: ExcitationKernel) -> dict:
    _check_kernel(kernel)
    if isinstance(kernel, ExpKernel):
        return {"type": "exp", "alpha": kernel.alpha, "beta": kernel.beta}
    return {"type": "powerlaw", "k": kernel.k, "c": kernel.c, "p": kernel.p}


def kernel_from_dict(data: dict) -> ExcitationKernel:
    """Inverse of :func:`kernel_to_dict`. A missing ``type`` means exponential."""
    kind = data.get("type", "exp")
    try:
        if kind == "exp":
            return ExpKernel(float(data["alpha"]), float(data["beta"]))
        if kind == "powerlaw":
            return PowerLawKernel(float(data["k"]), float(data["c"]), float(data["p"]))
    except KeyError as exc:
        raise ValidationError(f"kernel parameter {exc.args[0]!r} missing") from None
    raise ValidationError(f"unknown kernel type {kind!r}")
