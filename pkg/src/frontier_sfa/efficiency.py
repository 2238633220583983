"""Technical-efficiency scores from the fitted conditional distribution.

Given the per-country posterior N(mu*, sigma*^2) truncated at zero, two
point estimators are exported:

    jlms   E[u | eps] = mu* + sigma* phi(mu*/sigma*) / Phi(mu*/sigma*)
    te     E[exp(-d u) | eps]
         = exp(-d mu* + d^2 sigma*^2 / 2) Phi(mu*/sigma* - d sigma*) / Phi(mu*/sigma*)

``te`` (the bounded score in (0, 1)) is the canonical efficiency measure;
``jlms`` is exported alongside for transparency. Both are evaluated in the
log domain so that deeply efficient countries (mu*/sigma* far below -8)
stay finite. Under time decay the weight d is exp(-eta (t - T_max)), which
equals 1 in the last sample year; scores are reported at d = 1, i.e.
end-of-sample efficiency.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .errors import EstimationError
from .fitting import FitResult
from .model import FrontierSpec, PosteriorMoments, posterior_moments_panel
from .panel import INDICATORS, PanelDataset

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def jlms(moments: PosteriorMoments):
    """Conditional mean inefficiency E[u | eps]; strictly positive."""
    mu_star = np.asarray(moments.mu_star, dtype=float)
    sigma_star = np.asarray(moments.sigma_star, dtype=float)
    z = mu_star / sigma_star
    log_mills = (-0.5 * z * z - _LOG_SQRT_2PI) - log_ndtr(z)
    out = mu_star + sigma_star * np.exp(log_mills)
    return out if out.ndim else float(out)


def bc_efficiency(moments: PosteriorMoments, weight=1.0):
    """Conditional mean efficiency E[exp(-d u) | eps], in (0, 1)."""
    mu_star = np.asarray(moments.mu_star, dtype=float)
    sigma_star = np.asarray(moments.sigma_star, dtype=float)
    d = np.asarray(weight, dtype=float)
    if np.any(d <= 0):
        raise EstimationError("efficiency weight must be positive")
    z = mu_star / sigma_star
    log_te = (
        -d * mu_star + 0.5 * d * d * sigma_star * sigma_star
        + log_ndtr(z - d * sigma_star) - log_ndtr(z)
    )
    out = np.exp(log_te)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class EfficiencyScore:
    iso3: str
    output_index: int
    jlms: float
    te: float


@dataclass(frozen=True)
class CountryMean:
    iso3: str
    mean_te: float
    n_indicators: int


def score_panel(dataset: PanelDataset, spec: FrontierSpec, fit: FitResult):
    """One score per country in the output's estimation sample."""
    if not fit.converged:
        raise EstimationError("efficiency scores require a converged fit")
    eq = dataset.equation(spec.output_index)
    moments = posterior_moments_panel(dataset, spec, fit.params)
    u_hat = jlms(moments)
    te = bc_efficiency(moments)
    return [
        EfficiencyScore(iso3=eq.iso3s[i], output_index=spec.output_index,
                        jlms=float(u_hat[i]), te=float(te[i]))
        for i in range(eq.n_countries)
    ]


def mean_scores(scores) -> list:
    """Per-country mean te across indicators, with the indicator count.

    Countries absent from some output's estimation sample are averaged
    over the outputs where they do appear.
    """
    by_country = {}
    for s in scores:
        by_country.setdefault(s.iso3, []).append(s.te)
    return [
        CountryMean(iso3=iso3, mean_te=float(np.mean(vals)), n_indicators=len(vals))
        for iso3, vals in sorted(by_country.items())
    ]


def rank_countries(means) -> list:
    """Descending by mean score, ties broken by ISO3; stable and deterministic."""
    return sorted(means, key=lambda m: (-m.mean_te, m.iso3))


def indicator_ranking(scores, output_index: int) -> list:
    """Descending te ranking for one indicator (same tie rule)."""
    subset = [s for s in scores if s.output_index == output_index]
    return sorted(subset, key=lambda s: (-s.te, s.iso3))


def indicator_name(output_index: int) -> str:
    return INDICATORS[output_index - 1]
