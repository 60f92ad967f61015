import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_logit_problem(seed, n=40, p=12, signal=1.2, sparsity=4):
    """Random logistic data with enough noise to avoid complete separation."""
    gen = np.random.default_rng(seed)
    X = gen.standard_normal((n, p))
    beta = np.zeros(p)
    beta[:sparsity] = signal
    eta = X @ beta
    y = (gen.random(n) < 1.0 / (1.0 + np.exp(-eta))).astype(float)
    # re-draw once if a class came out empty; tiny n makes that possible
    if y.min() == y.max():
        y[gen.integers(0, n)] = 1.0 - y[0]
    return X, y


def make_gaussian_problem(seed, n=30, p=8):
    gen = np.random.default_rng(seed)
    X = gen.standard_normal((n, p))
    beta = gen.standard_normal(p)
    y = X @ beta + 0.3 * gen.standard_normal(n)
    return X, y


def separated_fixture():
    """Two predictors, response determined exactly by their comparison."""
    X = np.array([
        [1.0, 2.0], [2.0, 1.0], [0.5, 1.8], [2.2, 0.9],
        [0.8, 2.4], [2.6, 1.2], [0.3, 1.1], [1.9, 0.2],
        [1.1, 2.9], [3.0, 1.4], [0.6, 2.2], [2.4, 0.5],
    ])
    y = (X[:, 0] > X[:, 1]).astype(float)
    return X, y


def fit_invariant_report(model, X):
    """Replay the deflation from stored records and measure the invariants.

    Returns (max orthogonality violation, max centering violation, max
    loading norm error, max projection-row error), all as relative numbers.
    """
    w = model.weights
    Xj = X / model.column_scales - model.column_offsets
    ortho = 0.0
    centering = 0.0
    unit = 0.0
    proj = 0.0
    scores = [rec.score for rec in model.components]
    for k, sk in enumerate(scores):
        nk = np.sqrt((w * sk) @ sk)
        for l in range(k):
            sl = scores[l]
            nl = np.sqrt((w * sl) @ sl)
            ortho = max(ortho, abs((sk * w) @ sl) / (nk * nl))
    for rec in model.components:
        colmax = np.abs(Xj).max()
        centering = max(centering, np.abs(Xj.T @ w).max() / max(1.0, w.sum() * colmax))
        unit = max(unit, abs(np.linalg.norm(rec.loading) - 1.0))
        proj = max(proj, abs(float(rec.deflation_row @ rec.loading) - 1.0))
        Xj = Xj - np.outer(rec.score, rec.deflation_row)
    return ortho, centering, unit, proj
