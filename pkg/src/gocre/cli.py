"""Command-line interface.

Subcommands: ``fit``, ``predict``, ``simulate``, ``bench``, and
``rank-features``. Exit codes: 0 on success, 1 on runtime errors (bad
files, invalid values), 2 on usage errors. Computed numeric output is
written with 10 significant digits; copied input data keeps full precision.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from . import bench as bench_mod
from .dataio import load_csv, load_matrix_csv, save_csv
from .engine import (
    BIAS_NONE,
    DYNAMIC_FIRST,
    TWO_RUN,
    Dataset,
    FitConfig,
    fit_gocre,
    predict,
)
from .families import family_from_name
from .firth import CLOSED_FORM_DELTA, FULL_DELTA
from .model_io import load_model_with_names, save_model
from .ranking import wilcoxon_rank_features

_BIAS_FLAGS = {"none": BIAS_NONE, "full": FULL_DELTA, "closed": CLOSED_FORM_DELTA}
_WEIGHT_FLAGS = {"dynamic-first": DYNAMIC_FIRST, "two-run": TWO_RUN}


def _fmt(value):
    """Render one cell: floats at 10 significant digits, the rest as-is."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".10g")
    return str(value)


def _write_rows(path, fieldnames, rows):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[name]) for name in fieldnames])


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_fit(args):
    data = load_csv(args.data, args.response)
    family = family_from_name(args.family)
    config = FitConfig(
        max_components=args.kappa_max,
        tol=args.tol_alpha,
        weight_strategy=_WEIGHT_FLAGS[args.weights],
        bias_mode=_BIAS_FLAGS[args.bias],
        standardize=args.standardize,
        seed=args.seed,
    )
    model = fit_gocre(data, family, config)
    save_model(model, args.out_model, feature_names=data.feature_names)
    diag = model.diagnostics
    print(
        f"fitted {diag.components_built} components "
        f"(stop: {diag.stop_reason}); model written to {args.out_model}"
    )
    return 0


def _cmd_predict(args):
    model, stored_names = load_model_with_names(args.model)
    header, table = load_matrix_csv(args.data)
    names = list(header)
    if stored_names:
        if set(stored_names) <= set(names):
            cols = [names.index(name) for name in stored_names]
            table = table[:, cols]
        elif len(names) != len(stored_names):
            raise ValueError(
                f"prediction data has {len(names)} feature columns, "
                f"model expects {len(stored_names)}"
            )
    eta, mean = predict(model, table)
    _write_rows(
        args.out,
        ("eta", "mean"),
        [{"eta": e, "mean": m} for e, m in zip(eta, mean)],
    )
    print(f"wrote {len(eta)} predictions to {args.out}")
    return 0


def _parse_rhos(text):
    try:
        rhos = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise ValueError(f"--rho expects comma-separated numbers, got {text!r}") from None
    if not rhos:
        raise ValueError("--rho needs at least one value")
    return rhos


def _run_simulation(args, with_timings):
    sim = bench_mod.SimConfig(
        n_train=args.n_train,
        n_valid=args.n_valid,
        n_test=args.n_test,
        p=args.p,
        n_blocks=args.n_blocks,
        rho=0.0,
        laplace_location=args.laplace_location,
        laplace_scale=args.laplace_scale,
        replicates=args.replicates,
        max_components=args.kappa_max,
        base_seed=args.base_seed,
    )
    methods = tuple(name.strip() for name in args.methods.split(",") if name.strip())
    report = bench_mod.run_study(sim, _parse_rhos(args.rho), methods=methods, workers=args.workers)

    fields = bench_mod.SUMMARY_FIELDS
    _write_rows(args.out_report, fields, bench_mod.report_rows(report))
    print(f"wrote summary ({len(report.rows)} rows) to {args.out_report}")
    if args.replicates_out:
        _write_rows(
            args.replicates_out,
            bench_mod.REPLICATE_FIELDS,
            bench_mod.replicate_rows(report),
        )
        print(f"wrote per-replicate results to {args.replicates_out}")
    if with_timings and args.timings:
        rows = [
            {"method": row.method, "rho": row.rho, "mean_seconds": row.mean_seconds}
            for row in report.rows
        ]
        _write_rows(args.timings, ("method", "rho", "mean_seconds"), rows)
        print(f"wrote timings to {args.timings}")
    return 0


def _cmd_simulate(args):
    return _run_simulation(args, with_timings=False)


def _cmd_bench(args):
    return _run_simulation(args, with_timings=True)


def _cmd_rank_features(args):
    data = load_csv(args.data, args.response)
    pvalues, order = wilcoxon_rank_features(data.X, data.y)
    top = len(order) if args.top <= 0 else min(args.top, len(order))
    keep = order[:top]
    subset = Dataset(
        X=data.X[:, keep],
        y=data.y,
        feature_names=[data.feature_names[j] for j in keep],
        response_name=data.response_name,
    )
    save_csv(subset, args.out)
    print(f"wrote top {top} of {data.p} features to {args.out}")
    if args.ranking_out:
        rows = [
            {
                "rank": i + 1,
                "feature": data.feature_names[j],
                "column_index": int(j),
                "p_value": float(pvalues[j]),
            }
            for i, j in enumerate(order)
        ]
        _write_rows(args.ranking_out, ("rank", "feature", "column_index", "p_value"), rows)
        print(f"wrote ranking table to {args.ranking_out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_simulation_flags(parser):
    parser.add_argument("--n-train", type=int, default=100)
    parser.add_argument("--n-valid", type=int, default=100)
    parser.add_argument("--n-test", type=int, default=200)
    parser.add_argument("--p", type=int, default=1000)
    parser.add_argument("--n-blocks", type=int, default=10)
    parser.add_argument("--rho", default="0.0", help="comma-separated AR(1) coefficients")
    parser.add_argument("--laplace-location", type=float, default=2.0)
    parser.add_argument("--laplace-scale", type=float, default=1.0)
    parser.add_argument("--replicates", type=int, default=100)
    parser.add_argument("--kappa-max", type=int, default=10)
    parser.add_argument("--base-seed", type=int, default=0)
    parser.add_argument(
        "--methods",
        default=",".join(bench_mod.METHOD_NAMES),
        help="comma-separated subset of: " + ", ".join(bench_mod.METHOD_NAMES),
    )
    parser.add_argument("--workers", type=int, default=0, help="0 = one per CPU")
    parser.add_argument("--out-report", required=True)
    parser.add_argument("--replicates-out", default=None)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="gocre",
        description="Orthogonal-components regression for high-dimensional GLMs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit a model from a CSV file")
    p_fit.add_argument("--data", required=True)
    p_fit.add_argument("--response", required=True, help="response column name or 0-based index")
    p_fit.add_argument("--family", default="logit", help="logit or identity")
    p_fit.add_argument("--kappa-max", type=int, default=10)
    p_fit.add_argument("--bias", choices=sorted(_BIAS_FLAGS), default="closed")
    p_fit.add_argument("--weights", choices=sorted(_WEIGHT_FLAGS), default="dynamic-first")
    p_fit.add_argument("--tol-alpha", type=float, default=1e-8)
    p_fit.add_argument("--standardize", action="store_true")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--out-model", required=True)
    p_fit.set_defaults(handler=_cmd_fit)

    p_pred = sub.add_parser("predict", help="predict from a saved model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--out", required=True)
    p_pred.set_defaults(handler=_cmd_predict)

    p_sim = sub.add_parser("simulate", help="run the simulation benchmark")
    _add_simulation_flags(p_sim)
    p_sim.set_defaults(handler=_cmd_simulate)

    p_bench = sub.add_parser("bench", help="simulate plus wall-clock timings")
    _add_simulation_flags(p_bench)
    p_bench.add_argument("--timings", default=None, help="write per-method timings here")
    p_bench.set_defaults(handler=_cmd_bench)

    p_rank = sub.add_parser("rank-features", help="screen features by rank-sum p-value")
    p_rank.add_argument("--data", required=True)
    p_rank.add_argument("--response", required=True)
    p_rank.add_argument("--top", type=int, default=0, help="keep this many columns (0 = all)")
    p_rank.add_argument("--out", required=True)
    p_rank.add_argument("--ranking-out", default=None)
    p_rank.set_defaults(handler=_cmd_rank_features)

    return parser


def cli_dispatch(argv=None):
    """Parse and run one invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return args.handler(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))
