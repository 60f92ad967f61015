"""Feature screening by two-sided Wilcoxon rank-sum tests.

Small groups (both sizes at most 10) get an exact p-value from the full
permutation distribution of the rank sum; larger groups use the normal
approximation with tie correction and a continuity correction of one half.
Mid-ranks are used throughout, so ties are handled consistently in both
branches.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import norm, rankdata

from .validation import as_float_matrix, as_float_vector, check_same_length

EXACT_GROUP_LIMIT = 10


def _exact_two_sided(doubled_ranks, in_group):
    """Exact two-sided p-value of the rank sum via a counting recursion.

    Mid-ranks are halves, so doubling makes them integers and the null
    distribution of the (doubled) rank sum can be counted exactly with a
    subset-sum table: entry (k, s) is the number of k-subsets of the pooled
    doubled ranks summing to s. The two-sided p doubles the smaller tail.
    """
    n1 = int(in_group.sum())
    total_sum = int(doubled_ranks.sum())
    counts = np.zeros((n1 + 1, total_sum + 1), dtype=np.int64)
    counts[0, 0] = 1
    for d in doubled_ranks:
        d = int(d)
        upper = counts.shape[0] - 1
        for k in range(upper, 0, -1):
            if d:
                counts[k, d:] += counts[k - 1, :-d]
            else:
                counts[k] += counts[k - 1]
    pmf_counts = counts[n1]
    observed = int(doubled_ranks[in_group].sum())
    n_subsets = math.comb(len(doubled_ranks), n1)
    p_low = int(pmf_counts[: observed + 1].sum()) / n_subsets
    p_high = int(pmf_counts[observed:].sum()) / n_subsets
    return min(1.0, 2.0 * min(p_low, p_high))


def _normal_two_sided(ranks, values, in_group):
    """Tie-corrected normal approximation with continuity correction."""
    n = len(ranks)
    n1 = int(in_group.sum())
    n2 = n - n1
    observed = float(ranks[in_group].sum())
    mean = n1 * (n + 1) / 2.0
    _, tie_counts = np.unique(values, return_counts=True)
    tie_term = float(((tie_counts**3) - tie_counts).sum()) / (n * (n - 1))
    variance = n1 * n2 / 12.0 * ((n + 1) - tie_term)
    if variance <= 0.0:
        return 1.0
    z = max(abs(observed - mean) - 0.5, 0.0) / math.sqrt(variance)
    return min(1.0, 2.0 * float(norm.sf(z)))


def rank_sum_pvalue(values, in_group):
    """Two-sided Wilcoxon rank-sum p-value for one column.

    ``in_group`` is a boolean mask naming one of the two groups; by
    symmetry the p-value does not depend on which one.
    """
    values = as_float_vector(values, "values")
    in_group = np.asarray(in_group, dtype=bool)
    check_same_length(values, in_group, "values", "in_group")
    n1 = int(in_group.sum())
    n2 = len(values) - n1
    if n1 == 0 or n2 == 0:
        raise ValueError("both groups must be non-empty")
    ranks = rankdata(values, method="average")
    if max(n1, n2) <= EXACT_GROUP_LIMIT:
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        return _exact_two_sided(doubled, in_group)
    return _normal_two_sided(ranks, values, in_group)


def wilcoxon_rank_features(X, y):
    """Rank columns of ``X`` by two-sided rank-sum p-values between classes.

    Parameters
    ----------
    X : ndarray of shape (n, p)
    y : ndarray of shape (n,)
        Binary labels (exactly two distinct values, both present).

    Returns
    -------
    pvalues : ndarray of shape (p,)
    order : ndarray of shape (p,)
        Column indices sorted by ascending p-value; ties keep the smaller
        column index first.
    """
    X = as_float_matrix(X, "X")
    y = as_float_vector(y, "y")
    check_same_length(y, X, "y", "X rows")
    labels = np.unique(y)
    if labels.size != 2:
        raise ValueError(f"y must contain exactly two classes, found {labels.size}")
    in_group = y == labels[1]
    pvalues = np.array([rank_sum_pvalue(X[:, j], in_group) for j in range(X.shape[1])])
    order = np.argsort(pvalues, kind="stable")
    return pvalues, order
