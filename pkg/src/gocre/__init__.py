"""Orthogonal-components regression for high-dimensional GLMs.

Builds regression components one at a time, each a weighted covariance
direction between the deflated design and a GLM working response, so that
component scores stay mutually orthogonal in the weighted inner product.
Includes a leverage-based bias correction for separable logistic problems,
iteratively reweighted PLS baselines, a simulation benchmark, rank-sum
feature screening, and a command-line interface.
"""

from .baselines import IrplsResult, irpls_dg_fit, irpls_m_fit, weighted_pls
from .bench import (
    BenchmarkReport,
    SimConfig,
    gen_ar1_predictors,
    gen_bernoulli_responses,
    gen_laplace_coefficients,
    misclassification_rate,
    press,
    run_benchmark,
    run_study,
    select_n_components,
    select_n_components_from_metrics,
)
from .dataio import load_csv, save_csv
from .engine import (
    ComponentRecord,
    Dataset,
    FitConfig,
    FitDiagnostics,
    GocreModel,
    construct_component,
    deflate,
    fit_gocre,
    nested_linear_predictors,
    predict,
    recover_coefficients,
    weighted_center,
)
from .errors import (
    DataFormatError,
    DataParseError,
    DegenerateComponentError,
    UnsupportedVersionError,
)
from .estimator import GocreClassifier
from .families import LinkFamily, family_from_name, identity_gaussian, logit_bernoulli
from .firth import (
    LeverageSpec,
    closed_form_leverages,
    corrected_working_response,
    hat_leverages,
)
from .model_io import load_model, save_model
from .ranking import rank_sum_pvalue, wilcoxon_rank_features

__version__ = "0.1.0"

__all__ = [
    "BenchmarkReport",
    "ComponentRecord",
    "DataFormatError",
    "DataParseError",
    "Dataset",
    "DegenerateComponentError",
    "FitConfig",
    "FitDiagnostics",
    "GocreClassifier",
    "GocreModel",
    "IrplsResult",
    "LeverageSpec",
    "LinkFamily",
    "SimConfig",
    "UnsupportedVersionError",
    "closed_form_leverages",
    "construct_component",
    "corrected_working_response",
    "deflate",
    "family_from_name",
    "fit_gocre",
    "gen_ar1_predictors",
    "gen_bernoulli_responses",
    "gen_laplace_coefficients",
    "hat_leverages",
    "identity_gaussian",
    "irpls_dg_fit",
    "irpls_m_fit",
    "load_csv",
    "load_model",
    "logit_bernoulli",
    "misclassification_rate",
    "nested_linear_predictors",
    "predict",
    "press",
    "rank_sum_pvalue",
    "recover_coefficients",
    "run_benchmark",
    "run_study",
    "save_csv",
    "save_model",
    "select_n_components",
    "select_n_components_from_metrics",
    "weighted_center",
    "weighted_pls",
    "wilcoxon_rank_features",
]
