"""Iteratively reweighted PLS baselines.

Both baselines wrap the same outer loop: refresh the weights and working
response from the current linear predictor, re-center the design under the
new weights, and replace the usual least-squares step with a truncated
weighted PLS fit. They differ only in the working response: the first uses
the plain one, the second applies the leverage-based bias correction with
leverages recomputed from scratch at every outer iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import Dataset, weighted_center
from .families import logit_bernoulli
from .firth import corrected_working_response, hat_leverages
from .validation import as_float_matrix, as_float_vector, check_positive_weights, check_same_length

DIVERGENCE_NORM = 1e6


@dataclass
class IrplsResult:
    """Final state of an iteratively reweighted PLS fit.

    ``beta`` applies to columns centered by ``offsets``; predictions on new
    rows are ``intercept + (Xnew - offsets) @ beta``.
    """

    beta: np.ndarray
    intercept: float
    offsets: np.ndarray
    converged: bool
    iterations: int
    diverged: bool

    def linear_predictor(self, Xnew):
        Xnew = as_float_matrix(Xnew, "Xnew")
        if Xnew.shape[1] != self.beta.size:
            raise ValueError("Xnew column count does not match the fitted model")
        return self.intercept + (Xnew - self.offsets) @ self.beta


def weighted_pls(X, z, w, n_components):
    """One-response weighted PLS with X-only deflation.

    Each pass takes the weighted covariance direction between the deflated
    design and ``z``, scores it, regresses ``z`` on the score, and removes
    the score from the design. Construction stops early if the covariance
    vanishes, in which case the remaining coefficients stay zero.

    Parameters
    ----------
    X : ndarray of shape (n, p)
        Weighted-centered design (columns orthogonal to the weights).
    z : ndarray of shape (n,)
    w : ndarray of shape (n,)
        Strictly positive weights.
    n_components : int

    Returns
    -------
    beta : ndarray of shape (p,)
    intercept : float
        Weighted mean of ``z``.
    """
    X = as_float_matrix(X, "X")
    z = as_float_vector(z, "z")
    w = check_positive_weights(w, "w")
    check_same_length(z, X, "z", "X rows")
    check_same_length(w, z, "w", "z")
    if int(n_components) != n_components or n_components < 1:
        raise ValueError("n_components must be a positive integer")

    wz = w * z
    intercept = float(wz.sum() / w.sum())
    Xj = X.copy()
    directions, rows, coefs = [], [], []
    for _ in range(int(n_components)):
        cov = Xj.T @ wz
        cov_norm = float(np.linalg.norm(cov))
        if cov_norm == 0.0:
            break
        d = cov / cov_norm
        t = Xj @ d
        wt = w * t
        denom = float(wt @ t)
        if denom <= 0.0:
            break
        coefs.append(float((wt @ z) / denom))
        row = (wt @ Xj) / denom
        Xj -= np.outer(t, row)
        directions.append(d)
        rows.append(row)

    beta = np.zeros(X.shape[1])
    for j, (d, q) in enumerate(zip(directions, coefs)):
        v = d.copy()
        for k in range(j - 1, -1, -1):
            v -= directions[k] * float(rows[k] @ v)
        beta += q * v
    return beta, intercept


def _irpls(data, n_components, max_iter, tol, family, leverage_fn):
    family = family if family is not None else logit_bernoulli()
    family.validate_response(data.y)
    n, p = data.X.shape
    eta = np.zeros(n)
    beta = np.zeros(p)
    intercept = 0.0
    offsets = np.zeros(p)
    converged = False
    diverged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        w = family.variance_weight(eta)
        Xc, offsets_new = weighted_center(data.X, w)
        if leverage_fn is None:
            Z = family.working_response(data.y, eta)
        else:
            Z = corrected_working_response(family, data.y, eta, leverage_fn(Xc, w))
        beta_new, intercept_new = weighted_pls(Xc, Z, w, n_components)

        finite = bool(np.isfinite(beta_new).all() and np.isfinite(intercept_new))
        if not finite or np.linalg.norm(beta_new) > DIVERGENCE_NORM:
            diverged = True
            if finite:
                beta, intercept, offsets = beta_new, intercept_new, offsets_new
            break

        rel_change = np.linalg.norm(beta_new - beta) / max(1.0, np.linalg.norm(beta))
        beta, intercept, offsets = beta_new, intercept_new, offsets_new
        eta = intercept + Xc @ beta
        if rel_change < tol:
            converged = True
            break

    return IrplsResult(
        beta=beta,
        intercept=intercept,
        offsets=offsets,
        converged=converged,
        iterations=iterations,
        diverged=diverged,
    )


def irpls_m_fit(data, n_components, max_iter=100, tol=1e-6, family=None):
    """Iteratively reweighted PLS with the plain working response.

    Starts from a zero linear predictor and stops when the relative change
    of the coefficient vector drops below ``tol``, the iteration cap is hit,
    or the coefficients blow up (norm above 1e6 or non-finite), which is
    reported via the ``diverged`` flag.
    """
    if not isinstance(data, Dataset):
        raise ValueError("data must be a Dataset")
    return _irpls(data, n_components, max_iter, tol, family, leverage_fn=None)


def irpls_dg_fit(data, n_components, max_iter=100, tol=1e-6, family=None, leverage_fn=None):
    """Iteratively reweighted PLS with a bias-corrected working response.

    Same loop as :func:`irpls_m_fit`, but every outer iteration recomputes
    the hat-matrix diagonal of the freshly re-centered, re-weighted design
    and applies the leverage correction to the working response. The
    ``leverage_fn(Xc, w)`` hook exists for testing and defaults to the full
    SVD computation.
    """
    if not isinstance(data, Dataset):
        raise ValueError("data must be a Dataset")
    if leverage_fn is None:
        leverage_fn = lambda Xc, w: hat_leverages(Xc, w).leverages
    return _irpls(data, n_components, max_iter, tol, family, leverage_fn=leverage_fn)
