"""Scikit-learn style wrapper around the component engine."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .engine import DYNAMIC_FIRST, Dataset, FitConfig, fit_gocre, predict
from .families import logit_bernoulli
from .firth import CLOSED_FORM_DELTA
from .validation import as_float_matrix


class GocreClassifier(ClassifierMixin, TransformerMixin, BaseEstimator):
    """Binary classifier built from sequential weighted-orthogonal components.

    Designed for wide problems (many more columns than rows). By default the
    leverage-based bias correction keeps coefficient estimates finite even
    when the classes are linearly separable.

    Parameters
    ----------
    max_components : int, default=10
        Upper bound on the number of components.
    tol : float, default=1e-8
        Inner-loop convergence threshold on the loading direction.
    max_inner_iter : int, default=100
        Cap on working-response refreshes per component.
    stop_eps : float, default=1e-10
        Relative threshold for the early-stopping correlation test.
    weight_strategy : str, default="dynamic-first-component"
    bias_mode : str, default="closed-form-delta"
    standardize : bool, default=False
    seed : int, default=0

    Attributes
    ----------
    classes_ : ndarray of shape (2,)
    coef_ : ndarray of shape (n_features,)
        Coefficients on the original (uncentered, unscaled) columns.
    intercept_ : float
    n_components_ : int
    n_iter_ : list of int
        Inner-loop iterations per component.
    model_ : GocreModel
        The underlying fitted model.
    """

    def __init__(
        self,
        max_components=10,
        tol=1e-8,
        max_inner_iter=100,
        stop_eps=1e-10,
        weight_strategy=DYNAMIC_FIRST,
        bias_mode=CLOSED_FORM_DELTA,
        standardize=False,
        seed=0,
    ):
        self.max_components = max_components
        self.tol = tol
        self.max_inner_iter = max_inner_iter
        self.stop_eps = stop_eps
        self.weight_strategy = weight_strategy
        self.bias_mode = bias_mode
        self.standardize = standardize
        self.seed = seed

    def fit(self, X, y):
        """Fit on a binary target; labels may be any two distinct values."""
        X = as_float_matrix(X, "X")
        y = np.asarray(y)
        if y.ndim != 1 or len(y) != X.shape[0]:
            raise ValueError("y must be 1-d with one entry per row of X")
        self.classes_ = np.unique(y)
        if self.classes_.size != 2:
            raise ValueError(
                f"exactly two classes required, found {self.classes_.size}"
            )
        y01 = (y == self.classes_[1]).astype(np.float64)
        config = FitConfig(
            max_components=self.max_components,
            tol=self.tol,
            max_inner_iter=self.max_inner_iter,
            stop_eps=self.stop_eps,
            weight_strategy=self.weight_strategy,
            bias_mode=self.bias_mode,
            standardize=self.standardize,
            seed=self.seed,
        )
        model = fit_gocre(Dataset(X, y01), logit_bernoulli(), config)
        self.model_ = model
        self.coef_ = model.beta / model.column_scales
        self.intercept_ = float(model.intercept - model.column_offsets @ model.beta)
        self.n_components_ = model.n_components
        self.n_iter_ = list(model.diagnostics.inner_iters)
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("this GocreClassifier instance is not fitted yet")

    def decision_function(self, X):
        """Linear predictor (log-odds of the second class)."""
        self._check_fitted()
        eta, _ = predict(self.model_, X)
        return eta

    def predict_proba(self, X):
        self._check_fitted()
        _, mean = predict(self.model_, X)
        return np.column_stack([1.0 - mean, mean])

    def predict(self, X):
        proba = self.predict_proba(X)
        return self.classes_[(proba[:, 1] >= 0.5).astype(int)]

    def transform(self, X):
        """Component scores of new rows, one column per fitted component."""
        self._check_fitted()
        model = self.model_
        Xc = as_float_matrix(X, "X") / model.column_scales - model.column_offsets
        if model.n_components == 0:
            return np.zeros((Xc.shape[0], 0))
        return Xc @ np.column_stack(model.composite_loadings)
