"""Data-driven scores for ordered factors in linear and logistic models."""

from ._backend import BACKEND
from .contrasts import ContrastMatrix, poly_contrasts, truncate_contrasts
from .families import (
    FamilyKind, ScoreFamilyParams, ScoreGrid, ScoreRangeError, grid_levels,
    quantile_scores, rescale_scores, transform,
)
from .glm import BoxCoxProfile, FitSummary, boxcox_profile, fit, fit_logistic_grouped, fit_ols
from .modelframe import (
    BinomialResponse, DesignMatrix, FactorColumn, GaussianResponse, ModelFrame,
    NumericColumn, NumericTerm, PolyTerm, ScoreTerm, build_design, load_csv,
)
from .scorefit import OptimizerConfig, ScoreFitResult, nelder_mead, optimize_scores

__version__ = "0.1.0"
