"""Simulation benchmark: data generation, metrics, and the replicate driver.

Each replicate draws one coefficient vector and three independent splits
(train / validation / test), fits every requested method for all component
counts up to the cap, picks the count on validation error, and records test
misclassification and squared-error together with convergence flags and
wall-clock time. Everything except the timings is a pure function of the
base seed, so reports are reproducible no matter how many workers run.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .baselines import irpls_dg_fit, irpls_m_fit
from .engine import Dataset, FitConfig, fit_gocre, nested_linear_predictors
from .families import logit_bernoulli
from .firth import CLOSED_FORM_DELTA, FULL_DELTA
from .validation import as_float_vector, check_same_length

METHOD_NAMES = ("gocre", "gocre0", "irpls-m", "irpls-dg")

WORKER_ENV_VAR = "GOCRE_THREADS"


@dataclass(frozen=True)
class SimConfig:
    """Shape of one simulation scenario.

    ``p`` must be divisible by ``n_blocks``; predictors form that many
    independent first-order autoregressive blocks with coefficient ``rho``
    and standard normal marginals. Coefficients are drawn once per replicate
    from a Laplace distribution. Replicate ``r`` uses seed ``base_seed + r``.
    """

    n_train: int = 100
    n_valid: int = 100
    n_test: int = 200
    p: int = 1000
    n_blocks: int = 10
    rho: float = 0.0
    laplace_location: float = 2.0
    laplace_scale: float = 1.0
    replicates: int = 100
    max_components: int = 10
    base_seed: int = 0

    def __post_init__(self):
        for name in ("n_train", "n_valid", "n_test", "p", "n_blocks", "replicates", "max_components"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.p % self.n_blocks != 0:
            raise ValueError("p must be divisible by n_blocks")
        if not (0.0 <= self.rho < 1.0):
            raise ValueError("rho must lie in [0, 1)")
        if not (self.laplace_scale > 0):
            raise ValueError("laplace_scale must be positive")
        if int(self.base_seed) != self.base_seed or self.base_seed < 0:
            raise ValueError("base_seed must be a non-negative integer")


@dataclass
class ReplicateRecord:
    method: str
    rho: float
    replicate: int
    seed: int
    selected_components: int
    mr: float
    press: float
    press_sum: float
    converged: bool
    n_converged_fits: int
    seconds: float


@dataclass
class ReportRow:
    method: str
    rho: float
    replicates: int
    convergence_frequency: float
    median_mr: float
    mr_spread: float
    median_press: float
    press_spread: float
    median_press_sum: float
    mean_seconds: float


@dataclass
class BenchmarkReport:
    rows: list[ReportRow]
    replicates: list[ReplicateRecord]
    config: SimConfig
    methods: tuple[str, ...]
    rhos: tuple[float, ...] = field(default_factory=tuple)


# ---------------------------------------------------------------------------
# generators


def gen_ar1_predictors(n, p, n_blocks, rho, rng):
    """Draw predictors in independent AR(1) blocks with N(0, 1) marginals."""
    if p % n_blocks != 0:
        raise ValueError("p must be divisible by n_blocks")
    if not (0.0 <= rho < 1.0):
        raise ValueError("rho must lie in [0, 1)")
    block = p // n_blocks
    eps = rng.standard_normal((n, n_blocks, block))
    X = np.empty((n, n_blocks, block))
    X[:, :, 0] = eps[:, :, 0]
    scale = np.sqrt(1.0 - rho * rho)
    for t in range(1, block):
        X[:, :, t] = rho * X[:, :, t - 1] + scale * eps[:, :, t]
    return X.reshape(n, p)


def gen_laplace_coefficients(p, location, scale, rng):
    """Draw i.i.d. Laplace coefficients by inverting the CDF of a uniform."""
    u = rng.random(p) - 0.5
    return location - scale * np.sign(u) * np.log1p(-2.0 * np.abs(u))


def gen_bernoulli_responses(X, beta, intercept, rng):
    """Draw Bernoulli responses with success probability expit(intercept + X beta)."""
    family = logit_bernoulli()
    prob = family.inverse_link(intercept + X @ beta)
    return (rng.random(X.shape[0]) < prob).astype(np.float64)


# ---------------------------------------------------------------------------
# metrics and model-size selection


def misclassification_rate(y_true, prob):
    """Fraction of labels disagreeing with the probability thresholded at 0.5."""
    y_true = as_float_vector(y_true, "y_true")
    prob = as_float_vector(prob, "prob")
    check_same_length(y_true, prob, "y_true", "prob")
    if y_true.size == 0:
        raise ValueError("y_true must be non-empty")
    return float(np.mean((prob >= 0.5) != (y_true == 1.0)))


def press(y_true, prob):
    """Mean squared residual on the probability scale."""
    y_true = as_float_vector(y_true, "y_true")
    prob = as_float_vector(prob, "prob")
    check_same_length(y_true, prob, "y_true", "prob")
    if y_true.size == 0:
        raise ValueError("y_true must be non-empty")
    return float(np.mean((y_true - prob) ** 2))


def select_n_components_from_metrics(mr_values, press_values):
    """Pick the component count minimizing (MR, PRESS, count) lexicographically.

    Returns a 1-based count. Validation misclassification decides; exact
    ties fall back to validation PRESS, then to the smaller count.
    """
    mr_values = list(mr_values)
    press_values = list(press_values)
    if not mr_values or len(mr_values) != len(press_values):
        raise ValueError("mr_values and press_values must be equal-length and non-empty")
    best = min(range(len(mr_values)), key=lambda i: (mr_values[i], press_values[i], i))
    return best + 1


def select_n_components(probs_by_count, y_valid):
    """Pick a component count from per-count validation probabilities."""
    mr_values = [misclassification_rate(y_valid, p) for p in probs_by_count]
    press_values = [press(y_valid, p) for p in probs_by_count]
    return select_n_components_from_metrics(mr_values, press_values)


# ---------------------------------------------------------------------------
# per-method evaluation


@dataclass
class _MethodSweep:
    probs_valid: list[np.ndarray]
    probs_test: list[np.ndarray]
    converged_fits: list[bool]
    converged_overall: bool
    seconds: float


def _sweep_gocre(train, X_valid, X_test, max_components, bias_mode):
    family = logit_bernoulli()
    config = FitConfig(max_components=max_components, bias_mode=bias_mode)
    start = time.perf_counter()
    model = fit_gocre(train, family, config)
    seconds = time.perf_counter() - start
    flags = [rec.converged for rec in model.components]
    if model.n_components == 0:
        probs_valid = [family.inverse_link(np.full(X_valid.shape[0], model.intercept))]
        probs_test = [family.inverse_link(np.full(X_test.shape[0], model.intercept))]
        converged_fits = [True]
    else:
        probs_valid = [family.inverse_link(eta) for eta in nested_linear_predictors(model, X_valid)]
        probs_test = [family.inverse_link(eta) for eta in nested_linear_predictors(model, X_test)]
        converged_fits = [all(flags[: k + 1]) for k in range(len(flags))]
    return _MethodSweep(
        probs_valid=probs_valid,
        probs_test=probs_test,
        converged_fits=converged_fits,
        converged_overall=all(flags) if flags else True,
        seconds=seconds,
    )


def _sweep_irpls(train, X_valid, X_test, max_components, corrected):
    family = logit_bernoulli()
    fit_fn = irpls_dg_fit if corrected else irpls_m_fit
    probs_valid, probs_test, flags = [], [], []
    results = []
    start = time.perf_counter()
    for k in range(1, max_components + 1):
        result = fit_fn(train, k)
        results.append(result)
        probs_valid.append(family.inverse_link(result.linear_predictor(X_valid)))
        probs_test.append(family.inverse_link(result.linear_predictor(X_test)))
        flags.append(result.converged)
    seconds = time.perf_counter() - start
    return _MethodSweep(
        probs_valid=probs_valid,
        probs_test=probs_test,
        converged_fits=flags,
        converged_overall=None,  # resolved at the selected count
        seconds=seconds,
    )


def _evaluate_method(name, train, X_valid, X_test, max_components):
    if name == "gocre":
        return _sweep_gocre(train, X_valid, X_test, max_components, CLOSED_FORM_DELTA)
    if name == "gocre0":
        return _sweep_gocre(train, X_valid, X_test, max_components, FULL_DELTA)
    if name == "irpls-m":
        return _sweep_irpls(train, X_valid, X_test, max_components, corrected=False)
    if name == "irpls-dg":
        return _sweep_irpls(train, X_valid, X_test, max_components, corrected=True)
    raise ValueError(f"unknown method {name!r}; expected one of {METHOD_NAMES}")


# ---------------------------------------------------------------------------
# replicate driver


def generate_replicate(sim, rho, replicate):
    """Generate one replicate's data.

    Draw order (single stream seeded with ``base_seed + replicate``):
    coefficients, then predictors and responses for the train, validation,
    and test splits in that order.
    """
    seed = sim.base_seed + replicate
    rng = np.random.default_rng(seed)
    beta = gen_laplace_coefficients(sim.p, sim.laplace_location, sim.laplace_scale, rng)

    def split(n):
        X = gen_ar1_predictors(n, sim.p, sim.n_blocks, rho, rng)
        y = gen_bernoulli_responses(X, beta, 0.0, rng)
        return X, y

    X_train, y_train = split(sim.n_train)
    X_valid, y_valid = split(sim.n_valid)
    X_test, y_test = split(sim.n_test)
    return seed, Dataset(X_train, y_train), (X_valid, y_valid), (X_test, y_test)


def _run_replicate(sim, rho, replicate, methods):
    seed, train, (X_valid, y_valid), (X_test, y_test) = generate_replicate(sim, rho, replicate)
    records = []
    for name in methods:
        sweep = _evaluate_method(name, train, X_valid, X_test, sim.max_components)
        selected = select_n_components(sweep.probs_valid, y_valid)
        prob_test = sweep.probs_test[selected - 1]
        if sweep.converged_overall is None:
            converged = sweep.converged_fits[selected - 1]
        else:
            converged = sweep.converged_overall
        records.append(
            ReplicateRecord(
                method=name,
                rho=rho,
                replicate=replicate,
                seed=seed,
                selected_components=selected,
                mr=misclassification_rate(y_test, prob_test),
                press=press(y_test, prob_test),
                press_sum=float(np.sum((y_test - prob_test) ** 2)),
                converged=bool(converged),
                n_converged_fits=int(sum(sweep.converged_fits)),
                seconds=sweep.seconds,
            )
        )
    return records


def resolve_workers(requested=None):
    """Worker count for the replicate loop.

    ``None`` or 0 means one worker per CPU; the ``GOCRE_THREADS``
    environment variable caps the result when set to a positive integer.
    """
    if requested is None or requested == 0:
        workers = os.cpu_count() or 1
    else:
        workers = max(1, int(requested))
    cap = os.environ.get(WORKER_ENV_VAR, "").strip()
    if cap:
        try:
            cap_value = int(cap)
        except ValueError:
            raise ValueError(f"{WORKER_ENV_VAR} must be an integer, got {cap!r}")
        if cap_value > 0:
            workers = min(workers, cap_value)
    return workers


def run_study(sim, rhos, methods=METHOD_NAMES, workers=None):
    """Run the benchmark over several AR(1) coefficients.

    Per-replicate results are deterministic given ``sim.base_seed``; worker
    count affects only wall-clock columns.
    """
    rhos = tuple(float(r) for r in rhos)
    methods = tuple(methods)
    for name in methods:
        if name not in METHOD_NAMES:
            raise ValueError(f"unknown method {name!r}; expected one of {METHOD_NAMES}")
    tasks = [(rho, r) for rho in rhos for r in range(sim.replicates)]
    workers = min(resolve_workers(workers), len(tasks))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(
                pool.map(_run_replicate_star, [(sim, rho, r, methods) for rho, r in tasks])
            )
    else:
        chunks = [_run_replicate(sim, rho, r, methods) for rho, r in tasks]

    records = [rec for chunk in chunks for rec in chunk]
    rows = []
    for rho in rhos:
        for name in methods:
            group = [rec for rec in records if rec.method == name and rec.rho == rho]
            mr = np.array([rec.mr for rec in group])
            pr = np.array([rec.press for rec in group])
            ps = np.array([rec.press_sum for rec in group])
            rows.append(
                ReportRow(
                    method=name,
                    rho=rho,
                    replicates=len(group),
                    convergence_frequency=float(np.mean([rec.converged for rec in group])),
                    median_mr=float(np.median(mr)),
                    mr_spread=float(np.std(mr, ddof=1)) if len(group) > 1 else 0.0,
                    median_press=float(np.median(pr)),
                    press_spread=float(np.std(pr, ddof=1)) if len(group) > 1 else 0.0,
                    median_press_sum=float(np.median(ps)),
                    mean_seconds=float(np.mean([rec.seconds for rec in group])),
                )
            )
    return BenchmarkReport(rows=rows, replicates=records, config=sim, methods=methods, rhos=rhos)


def _run_replicate_star(args):
    return _run_replicate(*args)


def run_benchmark(sim, methods=METHOD_NAMES, workers=None):
    """Run the benchmark for the single scenario described by ``sim``."""
    return run_study(sim, [sim.rho], methods=methods, workers=workers)


# ---------------------------------------------------------------------------
# report serialization (rows of plain values; file writing lives in the CLI)

SUMMARY_FIELDS = (
    "method",
    "rho",
    "replicates",
    "convergence_frequency",
    "median_mr",
    "mr_spread",
    "median_press",
    "press_spread",
    "median_press_sum",
)

REPLICATE_FIELDS = (
    "method",
    "rho",
    "replicate",
    "seed",
    "selected_components",
    "mr",
    "press",
    "press_sum",
    "converged",
    "n_converged_fits",
)


def report_rows(report, include_timings=False):
    """Summary rows as dicts; timing columns only on request."""
    fields = SUMMARY_FIELDS + (("mean_seconds",) if include_timings else ())
    return [{name: getattr(row, name) for name in fields} for row in report.rows]


def replicate_rows(report, include_timings=False):
    """Per-replicate rows as dicts; timing columns only on request."""
    fields = REPLICATE_FIELDS + (("seconds",) if include_timings else ())
    return [{name: getattr(rec, name) for name in fields} for rec in report.replicates]
