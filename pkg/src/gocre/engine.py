"""Sequential construction of weighted-orthogonal regression components.

The fitting loop alternates two moves. Within a component it iterates a
working-response / loading / calibration cycle until the loading direction
stabilizes; between components it deflates the design so every new score is
orthogonal, in the weighted inner product, to all earlier scores. The full
coefficient vector is recovered afterwards from the per-component loadings
without ever forming a p-by-p matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateComponentError
from .families import IDENTITY_GAUSSIAN, LinkFamily, logit_bernoulli
from .firth import (
    CLOSED_FORM_DELTA,
    FULL_DELTA,
    closed_form_leverages,
    corrected_working_response,
    hat_leverages,
)
from .validation import (
    as_float_matrix,
    as_float_vector,
    check_positive_weights,
    check_same_length,
)

DYNAMIC_FIRST = "dynamic-first-component"
TWO_RUN = "two-run"
_STRATEGIES = (DYNAMIC_FIRST, TWO_RUN)

BIAS_NONE = "none"
_BIAS_MODES = (BIAS_NONE, FULL_DELTA, CLOSED_FORM_DELTA)

STOP_UNCORRELATED = "uncorrelated"
STOP_MAX_COMPONENTS = "max-components"
STOP_INNER_NONCONVERGENCE = "inner-nonconvergence"


@dataclass
class Dataset:
    """A design matrix paired with its response vector.

    Feature and response names are optional and only used by the I/O layer.
    """

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] | None = None
    response_name: str | None = None

    def __post_init__(self):
        self.X = as_float_matrix(self.X, "X")
        self.y = as_float_vector(self.y, "y")
        check_same_length(self.y, self.X, "y", "X rows")
        if self.X.shape[0] < 1 or self.X.shape[1] < 1:
            raise ValueError("X must have at least one row and one column")
        if self.feature_names is not None and len(self.feature_names) != self.X.shape[1]:
            raise ValueError("feature_names length must match the number of columns")

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]


@dataclass(frozen=True)
class FitConfig:
    """Knobs for the component engine.

    Parameters
    ----------
    max_components : int
        Upper bound on the number of components to construct.
    tol : float
        Inner-loop convergence threshold on the change of the loading
        direction (Euclidean norm).
    max_inner_iter : int
        Cap on working-response refreshes per component.
    stop_eps : float
        Relative threshold below which the deflated design is considered
        uncorrelated with the working response and construction stops.
    weight_strategy : str
        ``"dynamic-first-component"`` refreshes the weights during the first
        component only, then freezes them; ``"two-run"`` refits once more
        with weights taken from the first run's final linear predictor.
    bias_mode : str
        ``"none"``, ``"full-delta"`` (leverages via SVD) or
        ``"closed-form-delta"`` (leverages from the weights alone).
    standardize : bool
        Divide each column by its sample standard deviation before fitting.
    seed : int
        Echoed into persisted models and reports; the fit itself draws no
        random numbers.
    """

    max_components: int = 10
    tol: float = 1e-8
    max_inner_iter: int = 100
    stop_eps: float = 1e-10
    weight_strategy: str = DYNAMIC_FIRST
    bias_mode: str = BIAS_NONE
    standardize: bool = False
    seed: int = 0

    def __post_init__(self):
        if int(self.max_components) != self.max_components or self.max_components < 1:
            raise ValueError("max_components must be a positive integer")
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if int(self.max_inner_iter) != self.max_inner_iter or self.max_inner_iter < 1:
            raise ValueError("max_inner_iter must be a positive integer")
        if not (self.stop_eps > 0):
            raise ValueError("stop_eps must be positive")
        if self.weight_strategy not in _STRATEGIES:
            raise ValueError(
                f"unknown weight_strategy {self.weight_strategy!r}; "
                f"expected one of {_STRATEGIES}"
            )
        if self.bias_mode not in _BIAS_MODES:
            raise ValueError(
                f"unknown bias_mode {self.bias_mode!r}; expected one of {_BIAS_MODES}"
            )
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass
class ComponentRecord:
    """One constructed component.

    ``loading`` is the unit direction in the deflated design, ``score`` the
    corresponding column of fitted scores, ``coef`` its regression weight
    against the working response (refreshed while later components are
    built), and ``deflation_row`` the row vector that removed the score
    from the design.
    """

    loading: np.ndarray
    deflation_row: np.ndarray | None
    coef: float
    score: np.ndarray | None
    inner_iters: int
    converged: bool


@dataclass
class FitDiagnostics:
    components_built: int
    stop_reason: str
    inner_iters: list[int] = field(default_factory=list)


@dataclass
class GocreModel:
    """A fitted model: everything needed to predict and to inspect the fit.

    ``composite_loadings`` map the centered original design directly to the
    component scores; ``beta`` is their coefficient-weighted sum, so the
    linear predictor is ``intercept + X_centered @ beta``. Per-component
    snapshots of the coefficients and intercept allow evaluating every
    nested sub-model without refitting.
    """

    intercept: float
    components: list[ComponentRecord]
    composite_loadings: list[np.ndarray]
    beta: np.ndarray
    column_offsets: np.ndarray
    column_scales: np.ndarray
    weights: np.ndarray
    family: LinkFamily
    diagnostics: FitDiagnostics
    config: FitConfig
    coef_history: list[list[float]]
    intercept_history: list[float]
    fitted_eta: np.ndarray | None = None

    @property
    def n_components(self):
        return len(self.components)

    def predict(self, Xnew):
        return predict(self, Xnew)

    def nested_linear_predictors(self, Xnew):
        return nested_linear_predictors(self, Xnew)


# ---------------------------------------------------------------------------
# elementary operations


def weighted_center(X, w):
    """Remove the weighted column means from a design.

    Returns the centered matrix and the offsets that were removed, so that
    ``X == centered + offsets`` row-wise.
    """
    X = as_float_matrix(X, "X")
    w = check_positive_weights(w, "w")
    check_same_length(w, X, "w", "X rows")
    offsets = (w @ X) / w.sum()
    return X - offsets, offsets


def deflate(Xj, loading, w):
    """Remove a component's score from the design.

    The deflation row is chosen so the updated design is orthogonal, in the
    weighted inner product, to the score ``Xj @ loading``. Raises
    :class:`DegenerateComponentError` when the score has zero weighted norm.
    """
    Xj = as_float_matrix(Xj, "Xj")
    loading = as_float_vector(loading, "loading")
    w = check_positive_weights(w, "w")
    if loading.size != Xj.shape[1]:
        raise ValueError("loading length must match the number of columns")
    check_same_length(w, Xj, "w", "Xj rows")
    score = Xj @ loading
    ws = w * score
    denom = float(ws @ score)
    if denom <= 0.0:
        raise DegenerateComponentError("component score has zero weighted norm")
    row = (ws @ Xj) / denom
    return row, Xj - np.outer(score, row)


def construct_component(Xj, prior, y, eta_init, w, family, config, leverages=None):
    """Inner loop of one component under fixed weights.

    Starting from ``eta_init``, alternately refresh the working response,
    the intercept, the loading of ``Xj``, and the regression coefficients of
    all scores (earlier components included, whose records are updated in
    place), until the loading direction moves by less than ``config.tol``.

    Returns ``(record, intercept, eta)``, or ``None`` when the working
    response is numerically uncorrelated with ``Xj`` (relative criterion
    ``config.stop_eps``), which tells the caller to stop adding components.
    """
    Xj = as_float_matrix(Xj, "Xj")
    w = check_positive_weights(w, "w")
    eta = as_float_vector(eta_init, "eta_init").copy()
    w_sum = float(w.sum())
    x_absmax = float(np.abs(Xj).max()) if Xj.size else 0.0

    if prior:
        scores = np.stack([rec.score for rec in prior], axis=1)
        score_norms = np.einsum("ij,ij->j", scores, w[:, None] * scores)
    else:
        scores = None
        score_norms = None

    loading_prev = None
    converged = False
    iters = 0
    mu = 0.0
    prior_coefs = np.zeros(0)
    loading = score = None
    coef = 0.0

    for iters in range(1, config.max_inner_iter + 1):
        Z = _working(family, y, eta, leverages)
        wZ = w * Z
        cov = Xj.T @ wZ
        cov_norm = float(np.linalg.norm(cov))
        if iters == 1 and cov_norm < config.stop_eps * w_sum * max(1.0, x_absmax):
            return None
        if cov_norm == 0.0:
            return None
        loading = cov / cov_norm
        score = Xj @ loading
        denom = float((w * score) @ score)
        if denom <= 0.0:
            return None
        mu = float(wZ.sum() / w_sum)
        coef = float((score @ wZ) / denom)
        eta = mu + score * coef
        if scores is not None:
            prior_coefs = (scores.T @ wZ) / score_norms
            eta += scores @ prior_coefs
        if loading_prev is not None and np.linalg.norm(loading - loading_prev) < config.tol:
            converged = True
            break
        loading_prev = loading

    for rec, c in zip(prior, prior_coefs):
        rec.coef = float(c)
    record = ComponentRecord(
        loading=loading,
        deflation_row=None,
        coef=coef,
        score=score,
        inner_iters=iters,
        converged=converged,
    )
    return record, mu, eta


def recover_coefficients(components, n_features):
    """Map per-component loadings back to the original columns.

    Each composite loading is the component's loading pushed back through
    the deflations that preceded it, a sequence of rank-one updates applied
    as vector recursions. The full coefficient vector is the coefficient-
    weighted sum of the composite loadings.
    """
    if not components:
        raise ValueError("components must be non-empty")
    for rec in components:
        if rec.loading.shape != (n_features,):
            raise ValueError("component loading length does not match n_features")
        if rec.deflation_row is None:
            raise ValueError("component is missing its deflation row")
    composite = []
    beta = np.zeros(n_features)
    for j, rec in enumerate(components):
        v = rec.loading.copy()
        for k in range(j - 1, -1, -1):
            prev = components[k]
            v -= prev.loading * float(prev.deflation_row @ v)
        composite.append(v)
        beta += rec.coef * v
    return composite, beta


# ---------------------------------------------------------------------------
# fitting


def _working(family, y, eta, leverages):
    if leverages is None:
        return family.working_response(y, eta)
    return corrected_working_response(family, y, eta, leverages)


def _leverage_vector(bias_mode, Xc, w):
    if bias_mode == BIAS_NONE:
        return None
    if bias_mode == CLOSED_FORM_DELTA:
        return closed_form_leverages(w).leverages
    return hat_leverages(Xc, w).leverages


def _first_component_dynamic(X, y, family, config):
    """Build the first component while refreshing the weights every pass.

    The weights start at one and are recomputed before each pass from the
    average of the two most recent linear predictors, re-centering the
    design and, when bias correction is on, recomputing the leverages to
    match. Averaging matters: refreshing from the latest predictor alone
    settles into a two-pass oscillation on nearly separable data, while
    the averaged refresh damps that mode and leaves the fixed point
    unchanged (at convergence consecutive predictors coincide, so the
    frozen weights equal variance_weight of the limit). Everything is
    frozen at whatever the final pass used.
    """
    n = X.shape[0]
    eta = family.initial_eta(y)
    eta_prev = None
    w = np.ones(n)
    x_absmax = float(np.abs(X).max()) if X.size else 0.0

    loading_prev = None
    converged = False
    state = None
    for iters in range(1, config.max_inner_iter + 1):
        if iters > 1:
            w = family.variance_weight(0.5 * (eta + eta_prev))
        Xc, offsets = weighted_center(X, w)
        leverages = _leverage_vector(config.bias_mode, Xc, w)
        Z = _working(family, y, eta, leverages)
        wZ = w * Z
        w_sum = float(w.sum())
        mu = float(wZ.sum() / w_sum)
        cov = Xc.T @ wZ
        cov_norm = float(np.linalg.norm(cov))
        if cov_norm < config.stop_eps * w_sum * max(1.0, x_absmax) or cov_norm == 0.0:
            return None, (w, offsets, Xc, leverages, mu)
        loading = cov / cov_norm
        score = Xc @ loading
        denom = float((w * score) @ score)
        if denom <= 0.0:
            return None, (w, offsets, Xc, leverages, mu)
        coef = float((score @ wZ) / denom)
        eta_prev = eta
        eta = mu + score * coef
        state = (w, offsets, Xc, leverages, mu, loading, score, coef, eta, iters)
        if loading_prev is not None and np.linalg.norm(loading - loading_prev) < config.tol:
            converged = True
            break
        loading_prev = loading

    w, offsets, Xc, leverages, mu, loading, score, coef, eta, iters = state
    record = ComponentRecord(
        loading=loading,
        deflation_row=None,
        coef=coef,
        score=score,
        inner_iters=iters,
        converged=converged,
    )
    return (record, mu, eta), (w, offsets, Xc, leverages, mu)


def _zero_component_model(family, config, scales, frozen, y, n_features):
    w, offsets, _Xc, _lev, mu = frozen
    diagnostics = FitDiagnostics(components_built=0, stop_reason=STOP_UNCORRELATED)
    return GocreModel(
        intercept=mu,
        components=[],
        composite_loadings=[],
        beta=np.zeros(n_features),
        column_offsets=offsets,
        column_scales=scales,
        weights=w,
        family=family,
        diagnostics=diagnostics,
        config=config,
        coef_history=[],
        intercept_history=[],
        fitted_eta=np.full(len(y), mu),
    )


def _fit_single(X, y, family, config, scales, fixed_w=None):
    """One full pass of sequential component construction.

    ``fixed_w`` of None means the first component decides the weights
    dynamically; otherwise the given weights are used from the start.
    """
    p = X.shape[1]

    if fixed_w is None:
        first, frozen = _first_component_dynamic(X, y, family, config)
        if first is None:
            return _zero_component_model(family, config, scales, frozen, y, p)
        record, mu, eta = first
        w, offsets, Xc, leverages, _ = frozen
    else:
        w = check_positive_weights(fixed_w, "w")
        Xc, offsets = weighted_center(X, w)
        leverages = _leverage_vector(config.bias_mode, Xc, w)
        eta0 = family.initial_eta(y)
        result = construct_component(Xc, [], y, eta0, w, family, config, leverages)
        if result is None:
            Z = _working(family, y, eta0, leverages)
            mu = float((w * Z).sum() / w.sum())
            return _zero_component_model(
                family, config, scales, (w, offsets, Xc, leverages, mu), y, p
            )
        record, mu, eta = result

    components = [record]
    coef_history = [[record.coef]]
    intercept_history = [mu]
    row, Xwork = deflate(Xc, record.loading, w)
    record.deflation_row = row

    stop_reason = None
    if not record.converged:
        stop_reason = STOP_INNER_NONCONVERGENCE

    while stop_reason is None and len(components) < config.max_components:
        result = construct_component(Xwork, components, y, eta, w, family, config, leverages)
        if result is None:
            stop_reason = STOP_UNCORRELATED
            break
        record, mu, eta = result
        components.append(record)
        row, Xwork = deflate(Xwork, record.loading, w)
        record.deflation_row = row
        coef_history.append([rec.coef for rec in components])
        intercept_history.append(mu)
        if not record.converged:
            stop_reason = STOP_INNER_NONCONVERGENCE
    if stop_reason is None:
        stop_reason = STOP_MAX_COMPONENTS

    composite, beta = recover_coefficients(components, p)
    diagnostics = FitDiagnostics(
        components_built=len(components),
        stop_reason=stop_reason,
        inner_iters=[rec.inner_iters for rec in components],
    )
    return GocreModel(
        intercept=mu,
        components=components,
        composite_loadings=composite,
        beta=beta,
        column_offsets=offsets,
        column_scales=scales,
        weights=w,
        family=family,
        diagnostics=diagnostics,
        config=config,
        coef_history=coef_history,
        intercept_history=intercept_history,
        fitted_eta=eta,
    )


def fit_gocre(data, family=None, config=None):
    """Fit a sequential-component model to a dataset.

    Parameters
    ----------
    data : Dataset
    family : LinkFamily, optional
        Defaults to Bernoulli/logit.
    config : FitConfig, optional

    Returns
    -------
    GocreModel
    """
    if not isinstance(data, Dataset):
        raise ValueError("data must be a Dataset")
    family = family if family is not None else logit_bernoulli()
    config = config if config is not None else FitConfig()
    family.validate_response(data.y)
    if family.kind == IDENTITY_GAUSSIAN and config.bias_mode != BIAS_NONE:
        raise ValueError("bias correction is only supported for the logit family")

    X = data.X
    if config.standardize:
        scales = X.std(axis=0)
        scales = np.where(scales > 0, scales, 1.0)
        X = X / scales
    else:
        scales = np.ones(data.p)

    if config.weight_strategy == TWO_RUN:
        first_run = _fit_single(X, data.y, family, config, scales, fixed_w=None)
        w = family.variance_weight(first_run.fitted_eta)
        return _fit_single(X, data.y, family, config, scales, fixed_w=w)
    return _fit_single(X, data.y, family, config, scales, fixed_w=None)


# ---------------------------------------------------------------------------
# prediction


def _centered(model, Xnew):
    Xnew = as_float_matrix(Xnew, "Xnew")
    if Xnew.shape[1] != model.column_offsets.size:
        raise ValueError(
            f"Xnew has {Xnew.shape[1]} columns, model expects {model.column_offsets.size}"
        )
    return Xnew / model.column_scales - model.column_offsets


def predict(model, Xnew):
    """Linear predictor and mean response for new rows.

    Returns the pair ``(eta, mean)``.
    """
    eta = model.intercept + _centered(model, Xnew) @ model.beta
    return eta, model.family.inverse_link(eta)


def nested_linear_predictors(model, Xnew):
    """Linear predictors of every nested sub-model.

    Row ``k`` (0-indexed) of the returned array is the linear predictor of
    the model truncated to its first ``k + 1`` components, using the
    coefficient and intercept snapshots taken when that component was
    completed.
    """
    Xc = _centered(model, Xnew)
    m = model.n_components
    if m == 0:
        return np.zeros((0, Xc.shape[0]))
    T = Xc @ np.column_stack(model.composite_loadings)
    out = np.empty((m, Xc.shape[0]))
    for k in range(m):
        coefs = np.asarray(model.coef_history[k])
        out[k] = model.intercept_history[k] + T[:, : k + 1] @ coefs
    return out
