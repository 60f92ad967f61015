"""Leverage-based (Firth-style) correction of the working response.

The correction shrinks the working response toward the prior mode by the
diagonal of the weighted hat matrix. Two routes to that diagonal are
provided: a thin-SVD computation that works for any design, and a closed
form that is exact when the weighted-centered design has full row rank
minus one (the usual situation when there are more columns than rows).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import (
    as_float_matrix,
    as_float_vector,
    check_positive_weights,
    check_same_length,
)

FULL_DELTA = "full-delta"
CLOSED_FORM_DELTA = "closed-form-delta"


@dataclass(frozen=True)
class LeverageSpec:
    """Diagonal of the weighted hat matrix plus the mode that produced it."""

    leverages: np.ndarray
    mode: str

    def __post_init__(self):
        lev = as_float_vector(self.leverages, "leverages")
        if lev.size and (lev.min() < -1e-8 or lev.max() > 1.0 + 1e-8):
            raise ValueError("leverages must lie in [0, 1]")
        # clip roundoff so downstream arithmetic sees exact bounds
        object.__setattr__(self, "leverages", np.clip(lev, 0.0, 1.0))
        if self.mode not in (FULL_DELTA, CLOSED_FORM_DELTA):
            raise ValueError(f"unknown leverage mode {self.mode!r}")


def hat_leverages(X, w):
    """Hat-matrix diagonal of a weighted design, via thin SVD.

    The leverage of row i is the squared norm of the i-th row of the left
    singular block spanning the numerical rank of ``sqrt(w) * X``. Singular
    values at or below ``max(n, p) * eps * sigma_max`` are treated as zero.

    Parameters
    ----------
    X : ndarray of shape (n, p)
    w : ndarray of shape (n,)
        Strictly positive weights.

    Returns
    -------
    LeverageSpec
        Leverages in ``[0, 1]`` whose sum equals the numerical rank.
    """
    X = as_float_matrix(X, "X")
    w = check_positive_weights(w, "w")
    check_same_length(w, X, "w", "X rows")
    Xw = np.sqrt(w)[:, None] * X
    U, s, _ = np.linalg.svd(Xw, full_matrices=False)
    if s.size:
        cutoff = s[0] * max(Xw.shape) * np.finfo(np.float64).eps
        rank = int((s > cutoff).sum())
    else:
        rank = 0
    lev = np.einsum("ij,ij->i", U[:, :rank], U[:, :rank])
    return LeverageSpec(lev, FULL_DELTA)


def closed_form_leverages(w):
    """Leverages for a weighted-centered design of rank n - 1.

    When the centered design spans the whole space orthogonal to the
    weighted intercept (rank exactly ``n - 1``), the hat diagonal reduces to
    ``1 - w_i / sum(w)`` and no decomposition is needed.
    """
    w = check_positive_weights(w, "w")
    if w.size < 2:
        raise ValueError("closed-form leverages need at least two observations")
    return LeverageSpec(1.0 - w / w.sum(), CLOSED_FORM_DELTA)


def corrected_working_response(family, y, eta, leverages):
    """Working response with leverage-based bias correction.

    Each observation's response is augmented by half its leverage and the
    fitted mean is inflated by one plus the leverage, which pulls the
    update toward even odds and keeps estimates finite under separation.

    Parameters
    ----------
    family : LinkFamily
    y, eta : ndarray of shape (n,)
    leverages : ndarray of shape (n,)
        Hat-matrix diagonal, entries in ``[0, 1]``.
    """
    y = family.validate_response(y)
    eta = as_float_vector(eta, "eta")
    lev = as_float_vector(leverages, "leverages")
    check_same_length(y, eta, "y", "eta")
    check_same_length(y, lev, "y", "leverages")
    if lev.size and (lev.min() < 0 or lev.max() > 1):
        raise ValueError("leverages must lie in [0, 1]")
    mu = family.inverse_link(eta)
    one_plus = 1.0 + lev
    return eta + (y + 0.5 * lev - one_plus * mu) / (one_plus * family.mean_derivative(eta))
