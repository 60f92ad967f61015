"""Input validation helpers shared by the numerical modules."""

from __future__ import annotations

import numpy as np


def as_float_matrix(X, name="X"):
    """Coerce to a finite 2-d float64 array or raise ValueError."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_float_vector(x, name="x"):
    """Coerce to a finite 1-d float64 array or raise ValueError."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got ndim={arr.ndim}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_same_length(a, b, name_a, name_b):
    if len(a) != len(b):
        raise ValueError(
            f"{name_a} and {name_b} must have the same length "
            f"({len(a)} != {len(b)})"
        )


def check_positive_weights(w, name="w"):
    w = as_float_vector(w, name)
    if w.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if (w <= 0).any():
        raise ValueError(f"{name} must be strictly positive")
    return w
