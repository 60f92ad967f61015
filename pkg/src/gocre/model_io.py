"""JSON persistence of fitted models.

Floats are serialized as shortest round-trip decimals (the JSON module's
default), which reproduce the exact IEEE-754 double on load; the scheme is
recorded in the file's ``float_format`` field. Component scores are a
training-time artifact and are not persisted.
"""

from __future__ import annotations

import json

import numpy as np

from .engine import ComponentRecord, FitConfig, FitDiagnostics, GocreModel
from .errors import DataFormatError, UnsupportedVersionError
from .families import LinkFamily

FORMAT_NAME = "gocre-model"
FORMAT_VERSION = 1
FLOAT_FORMAT = "shortest round-trip decimal (exact IEEE-754 binary64)"


def _vector(values):
    return [float(v) for v in values]


def model_to_dict(model):
    """Plain-dict form of a fitted model, ready for JSON."""
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "float_format": FLOAT_FORMAT,
        "family": {"kind": model.family.kind, "dispersion": float(model.family.dispersion)},
        "intercept": float(model.intercept),
        "column_offsets": _vector(model.column_offsets),
        "column_scales": _vector(model.column_scales),
        "composite_loadings": [_vector(v) for v in model.composite_loadings],
        "coefs": [float(rec.coef) for rec in model.components],
        "beta": _vector(model.beta),
        "weights": _vector(model.weights),
        "components": [
            {
                "loading": _vector(rec.loading),
                "deflation_row": _vector(rec.deflation_row),
                "coef": float(rec.coef),
                "inner_iters": int(rec.inner_iters),
                "converged": bool(rec.converged),
            }
            for rec in model.components
        ],
        "coef_history": [[float(c) for c in snap] for snap in model.coef_history],
        "intercept_history": _vector(model.intercept_history),
        "feature_names": None,
        "config": {
            "max_components": model.config.max_components,
            "tol": model.config.tol,
            "max_inner_iter": model.config.max_inner_iter,
            "stop_eps": model.config.stop_eps,
            "weight_strategy": model.config.weight_strategy,
            "bias_mode": model.config.bias_mode,
            "standardize": model.config.standardize,
            "seed": model.config.seed,
        },
        "diagnostics": {
            "components_built": model.diagnostics.components_built,
            "stop_reason": model.diagnostics.stop_reason,
            "inner_iters": list(model.diagnostics.inner_iters),
        },
    }


def save_model(model, path, feature_names=None):
    """Write a fitted model to ``path`` as JSON."""
    payload = model_to_dict(model)
    if feature_names is not None:
        payload["feature_names"] = list(feature_names)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, separators=(",", ":"))
        handle.write("\n")


def model_from_dict(payload):
    if not isinstance(payload, dict) or payload.get("format") != FORMAT_NAME:
        raise DataFormatError("not a model file (missing format marker)")
    version = payload.get("version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(
            f"model file declares version {version!r}, this release reads version {FORMAT_VERSION}"
        )
    family = LinkFamily(payload["family"]["kind"], payload["family"]["dispersion"])
    config = FitConfig(**payload["config"])
    components = [
        ComponentRecord(
            loading=np.asarray(entry["loading"], dtype=np.float64),
            deflation_row=np.asarray(entry["deflation_row"], dtype=np.float64),
            coef=float(entry["coef"]),
            score=None,
            inner_iters=int(entry["inner_iters"]),
            converged=bool(entry["converged"]),
        )
        for entry in payload["components"]
    ]
    diag = payload["diagnostics"]
    model = GocreModel(
        intercept=float(payload["intercept"]),
        components=components,
        composite_loadings=[np.asarray(v, dtype=np.float64) for v in payload["composite_loadings"]],
        beta=np.asarray(payload["beta"], dtype=np.float64),
        column_offsets=np.asarray(payload["column_offsets"], dtype=np.float64),
        column_scales=np.asarray(payload["column_scales"], dtype=np.float64),
        weights=np.asarray(payload["weights"], dtype=np.float64),
        family=family,
        diagnostics=FitDiagnostics(
            components_built=int(diag["components_built"]),
            stop_reason=diag["stop_reason"],
            inner_iters=[int(v) for v in diag["inner_iters"]],
        ),
        config=config,
        coef_history=[[float(c) for c in snap] for snap in payload["coef_history"]],
        intercept_history=[float(v) for v in payload["intercept_history"]],
        fitted_eta=None,
    )
    return model, payload.get("feature_names")


def load_model(path):
    """Read a model written by :func:`save_model`; returns the model."""
    model, _ = load_model_with_names(path)
    return model


def load_model_with_names(path):
    """Read a model and the feature names stored with it (may be None)."""
    with open(path, encoding="utf-8") as handle:
        try:
            payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(payload)
