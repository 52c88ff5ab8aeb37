"""Input coercion shared by the estimator API."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .exceptions import ValidationError
from .intensity import EventSequence


def check_events(X, horizon=None) -> EventSequence:
    """Coerce ``X`` into an :class:`EventSequence`.

    ``X`` may already be an EventSequence, a 1-D array of times or an
    ``(n, 1)`` column. Without ``horizon`` the window ends at the last arrival;
    an empty input then has no usable window and is rejected.
    """
    if isinstance(X, EventSequence):
        if horizon is None or float(horizon) == X.horizon:
            return X
        return EventSequence(X.times, horizon)
    arr = check_array(X, ensure_2d=False, ensure_min_samples=0, dtype=np.float64)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValidationError(f"expected a single column of event times, got shape {arr.shape}")
        arr = arr[:, 0]
    if horizon is None:
        if arr.size == 0:
            raise ValidationError("empty event input needs an explicit horizon")
        horizon = arr[-1]
    return EventSequence(arr, horizon)


def check_rng(random_state) -> np.random.Generator:
    """Turn ``None``, an int seed, a SeedSequence or a Generator into a Generator."""
    return np.random.default_rng(random_state)
