"""Shared numeric helpers."""

from __future__ import annotations

import numpy as np


def stable_sum(a: np.ndarray, axis: int | None = None):
    """Sum whose result depends only on the multiset of addends.

    Sorting before the (pairwise) reduction makes the result invariant
    to any reordering of the input, which is what lets callers promise
    bit-identical estimates when observations are shuffled.  Adding 0.0
    first turns any -0.0 into +0.0 so signed zeros cannot leak order
    dependence through the sort.
    """
    a = np.asarray(a, dtype=float) + 0.0
    if axis is None:
        return float(np.sum(np.sort(a, axis=None)))
    return np.sum(np.sort(a, axis=axis), axis=axis)


def as_float_vector(values, name: str = "values") -> np.ndarray:
    """1-D float array with all entries finite; -0.0 normalized to +0.0."""
    arr = np.asarray(values, dtype=float) + 0.0
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr
