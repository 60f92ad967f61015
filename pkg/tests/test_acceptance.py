"""Release acceptance suite.

Every test here is one gate the package has to clear before shipping, and
each prints a single PASS/FAIL line with the measured numbers (run pytest
with ``-s`` or ``-rA`` to see them). The two simulation gates share one
study of eighty replicates at p = 1000, so this module takes a few minutes;
all results except wall-clock times are deterministic.
"""

import time

import numpy as np
import pytest

from gocre.baselines import irpls_dg_fit
from gocre.bench import METHOD_NAMES, SimConfig, generate_replicate, run_study
from gocre.engine import Dataset, FitConfig, fit_gocre, weighted_center
from gocre.families import identity_gaussian, logit_bernoulli
from gocre.firth import (
    CLOSED_FORM_DELTA,
    FULL_DELTA,
    closed_form_leverages,
    hat_leverages,
)
from gocre.ranking import rank_sum_pvalue

from conftest import fit_invariant_report, make_logit_problem, separated_fixture
from oracles import brute_force_ranksum_pvalue, nipals_pls1, ols_prediction

STUDY_RHOS = (0.0, 0.3, 0.5, 0.7)


def _verdict(num, name, ok, detail):
    print(f"criterion {num:2d} {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"criterion {num} {name}: {detail}"


@pytest.fixture(scope="module")
def study():
    sim = SimConfig(replicates=20, base_seed=0)
    return run_study(sim, STUDY_RHOS, workers=0)


def test_criterion_01_convergence_by_method(study):
    per_rho = {
        (row.method, row.rho): row.convergence_frequency for row in study.rows
    }
    pooled = {
        m: float(np.mean([rec.converged for rec in study.replicates if rec.method == m]))
        for m in METHOD_NAMES
    }
    ok = all(per_rho[("gocre", r)] == 1.0 for r in STUDY_RHOS)
    ok = ok and all(per_rho[("gocre0", r)] == 1.0 for r in STUDY_RHOS)
    ok = ok and all(per_rho[("irpls-m", r)] < 0.20 for r in STUDY_RHOS)
    ok = ok and pooled["gocre"] > pooled["irpls-dg"] > pooled["irpls-m"]
    detail = "pooled " + ", ".join(f"{m} {pooled[m]:.3f}" for m in METHOD_NAMES)
    _verdict(1, "convergence by method", ok, detail)


def _nearly_nonincreasing(seq, slack=0.01):
    rises = [b - a for a, b in zip(seq, seq[1:]) if b > a]
    return len(rises) <= 1 and all(r <= slack + 1e-12 for r in rises)


def test_criterion_02_accuracy_medians(study):
    mr = {row.rho: row.median_mr for row in study.rows if row.method == "gocre"}
    press = {row.rho: row.median_press for row in study.rows if row.method == "gocre"}
    ok = abs(mr[0.7] - 0.285) <= 0.05
    ok = ok and abs(press[0.7] - 0.2033) <= 0.02
    ok = ok and abs(mr[0.0] - 0.4275) <= 0.05
    ok = ok and _nearly_nonincreasing([mr[r] for r in STUDY_RHOS])
    ok = ok and _nearly_nonincreasing([press[r] for r in STUDY_RHOS])
    detail = (
        "median MR " + " ".join(f"{mr[r]:.4f}" for r in STUDY_RHOS)
        + ", median PRESS " + " ".join(f"{press[r]:.4f}" for r in STUDY_RHOS)
    )
    _verdict(2, "accuracy medians", ok, detail)


def test_criterion_03_leverage_route_agreement():
    worst = 0.0
    family = logit_bernoulli()
    for seed in range(50):
        X, y = make_logit_problem(1000 + seed, n=30, p=100)
        closed = fit_gocre(Dataset(X, y), family,
                           FitConfig(max_components=3, bias_mode=CLOSED_FORM_DELTA))
        full = fit_gocre(Dataset(X, y), family,
                         FitConfig(max_components=3, bias_mode=FULL_DELTA))
        _, p_closed = closed.predict(X)
        _, p_full = full.predict(X)
        worst = max(worst, float(np.abs(p_closed - p_full).max()))
    _verdict(3, "leverage route agreement", worst < 1e-6,
             f"max probability gap {worst:.3e} over 50 fits")


def test_criterion_04_leverage_formula_oracle():
    worst_wide = 0.0
    for seed in range(100):
        gen = np.random.default_rng(2000 + seed)
        n = 12 + seed % 9
        p = n + 5 + seed % 13
        X = gen.standard_normal((n, p))
        w = gen.uniform(0.2, 3.0, n)
        Xc, _ = weighted_center(X, w)
        gap = np.abs(hat_leverages(Xc, w).leverages
                     - closed_form_leverages(w).leverages).max()
        worst_wide = max(worst_wide, float(gap))

    worst_square = 0.0
    for seed in range(20):
        gen = np.random.default_rng(2200 + seed)
        n = 5 + seed % 6
        X = gen.standard_normal((n, n))
        w = gen.uniform(0.2, 3.0, n)
        gap = np.abs(hat_leverages(X, w).leverages - 1.0).max()
        worst_square = max(worst_square, float(gap))

    ok = worst_wide <= 1e-8 and worst_square <= 1e-10
    _verdict(4, "leverage formula oracle", ok,
             f"wide gap {worst_wide:.3e}, square gap {worst_square:.3e}")


def test_criterion_05_fit_invariants():
    bias_cycle = ("none", CLOSED_FORM_DELTA, FULL_DELTA)
    strategies = ("dynamic-first-component", "two-run")
    worst_ortho = 0.0
    worst_center = 0.0
    fitted = 0
    for i in range(100):
        if i % 5 == 4:
            gen = np.random.default_rng(3000 + i)
            n, p = 25 + i % 12, 5 + i % 40
            X = gen.standard_normal((n, p))
            y = X @ gen.standard_normal(p) + 0.4 * gen.standard_normal(n)
            family = identity_gaussian()
            bias = "none"
        else:
            n, p = 25 + i % 12, 5 + i % 40
            X, y = make_logit_problem(3000 + i, n=n, p=p)
            family = logit_bernoulli()
            bias = bias_cycle[i % 3]
        config = FitConfig(
            max_components=min(5, p),
            bias_mode=bias,
            weight_strategy=strategies[i % 2],
            standardize=(i % 3 == 0),
        )
        model = fit_gocre(Dataset(X, y), family, config)
        if model.n_components == 0:
            continue
        fitted += 1
        ortho, centering, _, _ = fit_invariant_report(model, X)
        worst_ortho = max(worst_ortho, ortho)
        worst_center = max(worst_center, centering)
    ok = worst_ortho <= 1e-8 and worst_center <= 1e-9 and fitted >= 95
    _verdict(5, "fit invariants", ok,
             f"{fitted} fits, worst orthogonality {worst_ortho:.3e}, "
             f"worst centering {worst_center:.3e}")


def test_criterion_06_duplicate_column_identifiability():
    family = logit_bernoulli()
    c = 2.0
    worst = 0.0
    for seed in range(20):
        X, y = make_logit_problem(4000 + seed, n=30, p=6)
        Xdup = np.hstack([X, c * X[:, [1]]])
        model = fit_gocre(Dataset(Xdup, y), family,
                          FitConfig(max_components=4, bias_mode=CLOSED_FORM_DELTA))
        psi = np.zeros(7)
        psi[1] = c
        psi[6] = -1.0
        scale = max(1.0, float(np.abs(model.beta).max()))
        worst = max(worst, abs(float(model.beta @ psi)) / scale)
        worst = max(worst, abs(model.beta[6] - c * model.beta[1]) / scale)
    _verdict(6, "duplicate column identifiability", worst <= 1e-6,
             f"worst relative error {worst:.3e} over 20 fixtures")


def test_criterion_07_pls_reduction():
    family = identity_gaussian()
    worst_score = 0.0
    worst_pred = 0.0
    widths = [3] * 7 + [8] * 7 + [40] * 6
    for seed, p in enumerate(widths):
        gen = np.random.default_rng(5000 + seed)
        X = gen.standard_normal((15, p))
        z = X @ gen.standard_normal(p) + 0.2 * gen.standard_normal(15)
        k = min(4, p)
        model = fit_gocre(Dataset(X, z), family, FitConfig(max_components=k))
        beta_o, int_o, scores_o = nipals_pls1(X, z, np.ones(15), k)
        assert model.n_components == scores_o.shape[1]
        for j, rec in enumerate(model.components):
            direct = float(np.abs(rec.score - scores_o[:, j]).max())
            flipped = float(np.abs(rec.score + scores_o[:, j]).max())
            worst_score = max(worst_score, min(direct, flipped))
        eta, _ = model.predict(X)
        eta_o = int_o + (X - X.mean(axis=0)) @ beta_o
        worst_pred = max(worst_pred, float(np.abs(eta - eta_o).max()))
    ok = worst_score <= 1e-8 and worst_pred <= 1e-8
    _verdict(7, "pls reduction", ok,
             f"worst score gap {worst_score:.3e}, "
             f"worst prediction gap {worst_pred:.3e} over 20 fixtures")


def test_criterion_08_least_squares_reduction():
    family = identity_gaussian()
    worst = 0.0
    for seed in range(20):
        gen = np.random.default_rng(6000 + seed)
        X = gen.standard_normal((12, 5))
        z = X @ gen.standard_normal(5) + 0.1 * gen.standard_normal(12)
        model = fit_gocre(Dataset(X, z), family, FitConfig(max_components=5))
        Xnew = gen.standard_normal((6, 5))
        eta, _ = model.predict(Xnew)
        worst = max(worst, float(np.abs(eta - ols_prediction(X, z, Xnew)).max()))
    _verdict(8, "least squares reduction", worst <= 1e-8,
             f"worst prediction gap {worst:.3e} over 20 fixtures")


def test_criterion_09_relative_speed():
    sim = SimConfig(n_train=140, n_valid=1, n_test=1, p=2000, n_blocks=10,
                    replicates=1, max_components=20, base_seed=99)
    _, train, _, _ = generate_replicate(sim, 0.5, 0)

    start = time.perf_counter()
    model = fit_gocre(train, logit_bernoulli(),
                      FitConfig(max_components=20, bias_mode=CLOSED_FORM_DELTA))
    t_gocre = time.perf_counter() - start

    start = time.perf_counter()
    for k in range(1, 21):
        irpls_dg_fit(train, k)
    t_dg = time.perf_counter() - start

    ok = t_gocre <= t_dg / 5.0
    ratio = t_dg / t_gocre if t_gocre > 0 else float("inf")
    _verdict(9, "relative speed", ok,
             f"{model.n_components} components in {t_gocre:.2f}s vs "
             f"{t_dg:.2f}s for twenty sweep fits, ratio {ratio:.1f}x")


def test_criterion_10_separation_robustness():
    X, y = separated_fixture()
    family = logit_bernoulli()
    corrected_ok = True
    norms = []
    for bias in (CLOSED_FORM_DELTA, FULL_DELTA):
        model = fit_gocre(Dataset(X, y), family,
                          FitConfig(max_components=2, bias_mode=bias))
        norm = float(np.linalg.norm(model.beta))
        norms.append(norm)
        corrected_ok = corrected_ok and all(r.converged for r in model.components)
        corrected_ok = corrected_ok and norm < 1e3
    plain = fit_gocre(Dataset(X, y), family,
                      FitConfig(max_components=2, bias_mode="none"))
    plain_flagged = not all(r.converged for r in plain.components)
    detail = (
        f"corrected |beta| {norms[0]:.3f} and {norms[1]:.3f}, "
        f"uncorrected flags non-convergence: {plain_flagged}"
    )
    _verdict(10, "separation robustness", corrected_ok, detail)


def test_criterion_11_ranksum_exactness():
    gen = np.random.default_rng(7000)
    worst = 0.0
    cases = 0
    for n1 in range(1, 9):
        for n2 in range(1, 9):
            n = n1 + n2
            mask = np.zeros(n, dtype=bool)
            mask[:n1] = True
            continuous = gen.standard_normal(n)
            tied = gen.integers(0, 4, n).astype(float)
            for values in (continuous, tied):
                got = rank_sum_pvalue(values, mask)
                expected = brute_force_ranksum_pvalue(values, mask)
                worst = max(worst, abs(got - expected))
                cases += 1
    _verdict(11, "rank-sum exactness", worst <= 1e-12,
             f"worst gap {worst:.3e} over {cases} group-size cases")
