"""Ordinary-least-squares baseline per output equation.

The OLS fit serves two purposes: a comparison table against the frontier
estimates, and the residual-skewness check that motivates including an
inefficiency term at all (one-sided inefficiency pushes residual skewness
negative).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, EstimationError
from .panel import CULTURE_DIMS, PanelDataset

OLS_PARAM_NAMES = ("constant",) + CULTURE_DIMS + ("gdp_level",)


@dataclass(frozen=True)
class OlsDiagnostics:
    output_index: int
    beta_ols: np.ndarray  # (8,) constant, 6 culture, GDP level
    residuals: np.ndarray
    r_squared: float
    skewness: float


def design_matrix(dataset: PanelDataset, output_index: int):
    """(y, X) for one output equation; X columns follow OLS_PARAM_NAMES."""
    eq = dataset.equation(output_index)
    X = np.column_stack([np.ones(eq.n_obs), eq.x, eq.z])
    return eq.y, X


def _collinear_columns(X, names):
    # a column is flagged when the others reproduce it almost exactly
    flagged = []
    for j in range(X.shape[1]):
        others = np.delete(X, j, axis=1)
        coef, _, _, _ = np.linalg.lstsq(others, X[:, j], rcond=None)
        resid = X[:, j] - others @ coef
        scale = max(1.0, float(np.abs(X[:, j]).max()))
        if np.abs(resid).max() < 1e-8 * scale:
            flagged.append(names[j])
    return flagged


def least_squares(y: np.ndarray, X: np.ndarray, names=None):
    """Least-squares core on raw arrays: (beta, residuals, r_squared).

    Solved through an orthogonal decomposition of the design matrix rather
    than the normal equations. ``names`` labels columns in error messages.
    """
    y = np.asarray(y, dtype=float)
    X = np.asarray(X, dtype=float)
    n, p = X.shape
    names = tuple(names) if names is not None else tuple(f"x{j}" for j in range(p))
    if n < p + 1:
        raise EstimationError(f"{n} rows cannot support {p} regressors")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst <= 1e-20 * max(1.0, float(y @ y)):
        raise EstimationError("zero-variance output column")
    beta, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < p:
        cols = _collinear_columns(X, names)
        raise EstimationError(
            "design matrix is rank deficient "
            f"(collinear columns: {', '.join(cols) or 'undetermined'})"
        )
    residuals = y - X @ beta
    ssr = float(residuals @ residuals)
    return beta, residuals, 1.0 - ssr / sst


def fit_ols(dataset: PanelDataset, output_index: int) -> OlsDiagnostics:
    """Per-output least-squares fit with R^2 and residual skewness."""
    y, X = design_matrix(dataset, output_index)
    try:
        beta, residuals, r_squared = least_squares(y, X, OLS_PARAM_NAMES)
    except EstimationError as exc:
        raise EstimationError(f"output {output_index}: {exc}") from None
    return OlsDiagnostics(
        output_index=output_index,
        beta_ols=beta,
        residuals=residuals,
        r_squared=r_squared,
        skewness=residual_skewness(residuals),
    )


def residual_skewness(residuals: np.ndarray) -> float:
    """Sample skewness m3 / m2^(3/2) with 1/n central moments."""
    e = np.asarray(residuals, dtype=float)
    if e.size < 3:
        raise DataError("skewness needs at least 3 residuals")
    c = e - e.mean()
    m2 = float(np.mean(c**2))
    if m2 == 0.0:
        raise DataError("zero variance; skewness undefined")
    m3 = float(np.mean(c**3))
    return m3 / m2**1.5
