"""Standard errors, significance marks, and the model-selection ladder."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import InferenceError
from .fitting import FitOptions, FitResult, fit_mle
from .model import Distribution, FrontierSpec, TimeModel
from .ols import fit_ols
from .panel import INDICATORS, PanelDataset


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    estimate: float
    se: float
    z: float
    p: float
    stars: str


@dataclass(frozen=True)
class CoefficientTable:
    output_index: int
    rows: tuple  # CoefficientRow per free parameter
    loglik: float

    def row(self, name: str) -> CoefficientRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def significance_stars(p: float) -> str:
    """Conventional marks; a p exactly at a threshold earns the weaker mark."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def standard_errors_from_hessian(estimates, hessian, names) -> tuple:
    """Rows of (estimate, se, z, p, stars) from a log-likelihood Hessian.

    The information matrix is the negative Hessian at the optimum; it must
    be positive definite, otherwise the failure is reported rather than
    pseudo-inverted away.
    """
    info = -np.asarray(hessian, dtype=float)
    eigs = np.linalg.eigvalsh(info)
    if np.any(eigs <= 0):
        raise InferenceError(
            "Hessian is not negative definite at the reported optimum "
            f"(information-matrix eigenvalues {np.array2string(eigs, precision=3)})",
            eigenvalues=eigs,
            condition_number=float(eigs.max() / abs(eigs).min()) if eigs.min() != 0 else math.inf,
        )
    cov = np.linalg.inv(info)
    rows = []
    for k, name in enumerate(names):
        est = float(estimates[k])
        se = float(math.sqrt(cov[k, k]))
        z = est / se if se > 0 else math.inf * np.sign(est)
        p = float(2.0 * ndtr(-abs(z)))
        rows.append(CoefficientRow(name, est, se, z, p, significance_stars(p)))
    return tuple(rows)


def standard_errors(fit: FitResult) -> CoefficientTable:
    """Asymptotic standard errors from the inverse information matrix."""
    if not fit.converged:
        raise InferenceError("standard errors require a converged fit")
    rows = standard_errors_from_hessian(fit.estimates, fit.hessian, fit.param_names)
    return CoefficientTable(output_index=fit.spec.output_index, rows=rows,
                            loglik=fit.loglik)


@dataclass(frozen=True)
class OutputSelection:
    indicator: str
    skewness: float | None
    inefficiency_evidence: bool
    eta: float | None
    time_invariant: bool | None
    mu: float | None
    mu_se: float | None
    mu_p: float | None
    truncated_normal: bool | None
    chosen: FrontierSpec | None


@dataclass(frozen=True)
class SelectionReport:
    """Three-step specification ladder, one verdict set per output.

    Rules, applied to the recorded statistics: an inefficiency term is
    warranted when OLS residual skewness is negative; the time-invariant
    model is kept when |eta| from the time-decay fit stays below the
    threshold; the truncated-normal distribution is kept when mu differs
    from zero at the 5% level in the time-invariant fit.
    """

    outputs: tuple  # OutputSelection per indicator
    eta_threshold: float

    def for_indicator(self, indicator: str) -> OutputSelection:
        for o in self.outputs:
            if o.indicator == indicator:
                return o
        raise KeyError(indicator)


def select_output_spec(dataset: PanelDataset, output_index: int,
                       options: FitOptions, eta_threshold: float = 0.01,
                       mu_alpha: float = 0.05) -> OutputSelection:
    """Run the three-step ladder for one output."""
    indicator = INDICATORS[output_index - 1]
    if dataset.equation(output_index).n_obs == 0:
        return OutputSelection(
            indicator=indicator, skewness=None, inefficiency_evidence=False,
            eta=None, time_invariant=None, mu=None, mu_se=None, mu_p=None,
            truncated_normal=None, chosen=None,
        )
    ols = fit_ols(dataset, output_index)
    if ols.skewness >= 0:
        return OutputSelection(
            indicator=indicator, skewness=ols.skewness,
            inefficiency_evidence=False, eta=None, time_invariant=None,
            mu=None, mu_se=None, mu_p=None, truncated_normal=None, chosen=None,
        )

    ti_spec = FrontierSpec(output_index, Distribution.TRUNCATED_NORMAL,
                           TimeModel.TIME_INVARIANT)
    ti_fit = fit_mle(dataset, ti_spec, options)
    td_fit = fit_mle(
        dataset,
        FrontierSpec(output_index, Distribution.TRUNCATED_NORMAL, TimeModel.TIME_DECAY),
        options, warm_start=ti_fit.params,
    )
    eta = td_fit.params.eta
    time_invariant = abs(eta) < eta_threshold

    mu_row = standard_errors(ti_fit).row("mu")
    truncated_normal = mu_row.p < mu_alpha

    chosen = FrontierSpec(
        output_index,
        Distribution.TRUNCATED_NORMAL if truncated_normal else Distribution.HALF_NORMAL,
        TimeModel.TIME_INVARIANT if time_invariant else TimeModel.TIME_DECAY,
    )
    return OutputSelection(
        indicator=indicator, skewness=ols.skewness, inefficiency_evidence=True,
        eta=eta, time_invariant=time_invariant,
        mu=mu_row.estimate, mu_se=mu_row.se, mu_p=mu_row.p,
        truncated_normal=truncated_normal, chosen=chosen,
    )


def model_selection(dataset: PanelDataset, options: FitOptions = FitOptions(),
                    eta_threshold: float = 0.01,
                    mu_alpha: float = 0.05) -> SelectionReport:
    """Apply the specification ladder to all six outputs."""
    outputs = tuple(
        select_output_spec(dataset, j, options, eta_threshold, mu_alpha)
        for j in range(1, len(INDICATORS) + 1)
    )
    return SelectionReport(outputs=outputs, eta_threshold=eta_threshold)
