"""Panel stochastic-frontier toolkit.

Estimates how country-level inputs map to governance outputs through a
frontier with one-sided inefficiency, and scores each country's technical
efficiency. The pipeline: CSV ingestion and variable transforms, OLS
diagnostics, truncated-normal panel MLE, inference, efficiency scoring,
and a synthetic-data module whose quadrature and Monte Carlo oracles
certify every closed form.
"""

from ._kernels import BACKEND
from .efficiency import (CountryMean, EfficiencyScore, bc_efficiency,
                         indicator_ranking, jlms, mean_scores, rank_countries,
                         score_panel)
from .errors import (ConfigError, DataError, EstimationError, FrontierError,
                     InferenceError, OracleError, ParameterError)
from .fitting import (FitOptions, FitResult, fit_mle, from_unconstrained,
                      numerical_gradient, to_unconstrained)
from .inference import (CoefficientRow, CoefficientTable, SelectionReport,
                        model_selection, significance_stars, standard_errors)
from .model import (Distribution, FrontierParams, FrontierSpec,
                    PosteriorMoments, TimeModel, loglik_panel,
                    posterior_moments, posterior_moments_panel, residuals,
                    time_weights, variance_share)
from .ols import OlsDiagnostics, fit_ols, least_squares, residual_skewness
from .panel import (CULTURE_DIMS, INDICATORS, CountryRecord, EquationData,
                    IngestConfig, IngestReport, PanelDataset,
                    PanelObservation, gdp_level, load_panel, scale_culture,
                    standardize_outputs)
from .synthetic import (DEFAULT_YEARS, MCConditional, SyntheticPanel,
                        generate_covariates, generate_panel, mc_conditional,
                        quadrature_loglik, sample_truncated_normal)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CULTURE_DIMS",
    "CoefficientRow",
    "CoefficientTable",
    "ConfigError",
    "CountryMean",
    "CountryRecord",
    "DEFAULT_YEARS",
    "DataError",
    "Distribution",
    "EfficiencyScore",
    "EquationData",
    "EstimationError",
    "FitOptions",
    "FitResult",
    "FrontierError",
    "FrontierParams",
    "FrontierSpec",
    "INDICATORS",
    "InferenceError",
    "IngestConfig",
    "IngestReport",
    "MCConditional",
    "OlsDiagnostics",
    "OracleError",
    "PanelDataset",
    "PanelObservation",
    "ParameterError",
    "PosteriorMoments",
    "SelectionReport",
    "SyntheticPanel",
    "TimeModel",
    "bc_efficiency",
    "fit_mle",
    "fit_ols",
    "from_unconstrained",
    "gdp_level",
    "generate_covariates",
    "generate_panel",
    "indicator_ranking",
    "jlms",
    "least_squares",
    "load_panel",
    "loglik_panel",
    "mc_conditional",
    "mean_scores",
    "model_selection",
    "numerical_gradient",
    "posterior_moments",
    "posterior_moments_panel",
    "quadrature_loglik",
    "rank_countries",
    "residual_skewness",
    "residuals",
    "sample_truncated_normal",
    "scale_culture",
    "score_panel",
    "significance_stars",
    "standard_errors",
    "standardize_outputs",
    "time_weights",
    "to_unconstrained",
    "variance_share",
]
