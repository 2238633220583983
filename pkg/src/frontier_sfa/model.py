"""Panel stochastic-frontier model: parameters, posterior moments, likelihood.

The composed-error model for one output is

    y_it = alpha + sum_k beta_k x_ik + gamma z_it - d_it u_i + v_it

with u_i ~ N(mu, sigma_u^2) truncated at zero, v_it ~ N(0, sigma_v^2),
u independent of v, and the share parametrization

    sigma_u^2 = theta sigma^2,    sigma_v^2 = (1 - theta) sigma^2.

Time weights are d_it = 1 (time-invariant inefficiency) or
d_it = exp(-eta (t - T_max)) with T_max the last sample year (time decay).
The half-normal variant is the truncated-normal model with mu pinned to 0.

With A_i = sigma_v^2 + sigma_u^2 sum_t d_it^2, the conditional (posterior)
distribution of u_i given the country's residuals is N(mu*_i, sigma*_i^2)
truncated at zero, where

    sigma*_i^2 = sigma_u^2 sigma_v^2 / A_i
    mu*_i      = (mu sigma_v^2 - sigma_u^2 sum_t d_it eps_it) / A_i

and the per-country log-likelihood contribution has the closed form

    ll_i = -(T_i/2) log(2 pi) - ((T_i-1)/2) log sigma_v^2 - (1/2) log A_i
           + log Phi(mu*_i / sigma*_i) - log Phi(mu / sigma_u)
           - (1/2) [ sum_t eps_it^2 / sigma_v^2 + mu^2 / sigma_u^2
                     - mu*_i^2 / sigma*_i^2 ].

This closed form is certified against an adaptive-quadrature oracle that
integrates the u_i out numerically (see the synthetic module); every
log-CDF evaluation stays finite for arguments down to -38 and far beyond.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import EstimationError, ParameterError
from .panel import N_CONTROLS, N_INPUTS, EquationData, PanelDataset


class Distribution(enum.Enum):
    HALF_NORMAL = "half-normal"
    TRUNCATED_NORMAL = "truncated-normal"


class TimeModel(enum.Enum):
    TIME_INVARIANT = "time-invariant"
    TIME_DECAY = "time-decay"


@dataclass(frozen=True)
class FrontierSpec:
    """Model choice for one output equation."""

    output_index: int
    distribution: Distribution = Distribution.TRUNCATED_NORMAL
    time_model: TimeModel = TimeModel.TIME_INVARIANT

    def __post_init__(self):
        if not 1 <= self.output_index <= 6:
            raise ParameterError(f"output_index must be 1..6, got {self.output_index}")


@dataclass(frozen=True)
class FrontierParams:
    """Full parameter vector of one frontier equation.

    ``mu`` must be 0 under the half-normal distribution and ``eta`` must be
    0 under the time-invariant model; ``validate`` enforces both.
    """

    alpha: float
    beta: np.ndarray  # (6,) culture coefficients
    gamma: np.ndarray  # (1,) GDP-level coefficient
    sigma2: float
    theta: float
    mu: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "beta", np.atleast_1d(np.asarray(self.beta, dtype=float)))
        object.__setattr__(self, "gamma", np.atleast_1d(np.asarray(self.gamma, dtype=float)))

    @property
    def sigma_u2(self) -> float:
        return self.theta * self.sigma2

    @property
    def sigma_v2(self) -> float:
        return (1.0 - self.theta) * self.sigma2

    @property
    def sigma_u(self) -> float:
        return math.sqrt(self.sigma_u2)

    @property
    def sigma_v(self) -> float:
        return math.sqrt(self.sigma_v2)

    def validate(self, spec: FrontierSpec | None = None):
        values = [self.alpha, self.sigma2, self.theta, self.mu, self.eta,
                  *self.beta, *self.gamma]
        if not all(math.isfinite(v) for v in values):
            raise ParameterError("non-finite parameter value")
        if self.beta.size != N_INPUTS or self.gamma.size != N_CONTROLS:
            raise ParameterError(
                f"expected {N_INPUTS} betas and {N_CONTROLS} gammas, "
                f"got {self.beta.size} and {self.gamma.size}"
            )
        if not self.sigma2 > 0:
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2}")
        if not 0.0 < self.theta < 1.0:
            raise ParameterError(f"theta must lie in (0, 1), got {self.theta}")
        if spec is not None:
            if spec.distribution is Distribution.HALF_NORMAL and self.mu != 0.0:
                raise ParameterError("mu must be 0 under the half-normal model")
            if spec.time_model is TimeModel.TIME_INVARIANT and self.eta != 0.0:
                raise ParameterError("eta must be 0 under the time-invariant model")
        return self


@dataclass(frozen=True)
class PosteriorMoments:
    """Moments of the zero-truncated normal u | eps (scalar or per-country arrays)."""

    mu_star: object
    sigma_star: object

    def __post_init__(self):
        if np.any(np.asarray(self.sigma_star) <= 0):
            raise ParameterError("sigma_star must be positive")


def time_weights(years: np.ndarray, spec: FrontierSpec, params: FrontierParams,
                 year_max: int) -> np.ndarray:
    """d_it weights: all ones unless the spec carries time decay."""
    if spec.time_model is TimeModel.TIME_INVARIANT:
        return np.ones(len(years))
    return np.exp(-params.eta * (np.asarray(years, dtype=float) - year_max))


def _stacked_residuals(eq: EquationData, params: FrontierParams) -> np.ndarray:
    return eq.y - params.alpha - eq.x @ params.beta - eq.z * params.gamma[0]


def residuals(dataset: PanelDataset, spec: FrontierSpec, params: FrontierParams):
    """Composed errors eps_it = v_it - d_it u_i, as one array per country."""
    params.validate(spec)
    eq = dataset.equation(spec.output_index)
    eps = _stacked_residuals(eq, params)
    return [eps[eq.offsets[i]:eq.offsets[i + 1]] for i in range(eq.n_countries)]


def posterior_moments(eps_i, weights_i, params: FrontierParams) -> PosteriorMoments:
    """Conditional moments of u_i given one country's residuals."""
    params.validate()
    eps_i = np.asarray(eps_i, dtype=float)
    if eps_i.size == 0:
        raise ParameterError("empty residual list")
    d = np.asarray(weights_i, dtype=float)
    offsets = np.array([0, eps_i.size], dtype=np.int64)
    mu_star, sigma_star = _kernels.posterior_by_country(
        eps_i, d, offsets, params.sigma_v2, params.sigma_u2, params.mu
    )
    return PosteriorMoments(mu_star=float(mu_star[0]), sigma_star=float(sigma_star[0]))


def posterior_moments_panel(dataset: PanelDataset, spec: FrontierSpec,
                            params: FrontierParams) -> PosteriorMoments:
    """Conditional moments for every country in the output's sample."""
    params.validate(spec)
    eq = dataset.equation(spec.output_index)
    eps = _stacked_residuals(eq, params)
    d = time_weights(eq.years, spec, params, dataset.year_max)
    mu_star, sigma_star = _kernels.posterior_by_country(
        eps, d, eq.offsets, params.sigma_v2, params.sigma_u2, params.mu
    )
    return PosteriorMoments(mu_star=mu_star, sigma_star=sigma_star)


def loglik_terms(eq: EquationData, eps: np.ndarray, d: np.ndarray,
                 params: FrontierParams) -> np.ndarray:
    """Per-country ll_i over a prepared equation; no validation."""
    return _kernels.loglik_by_country(
        eps, d, eq.offsets, params.sigma_v2, params.sigma_u2, params.mu
    )


def loglik_panel(dataset: PanelDataset, spec: FrontierSpec,
                 params: FrontierParams) -> float:
    """Panel log-likelihood; raises when any country's term is non-finite."""
    params.validate(spec)
    eq = dataset.equation(spec.output_index)
    eps = _stacked_residuals(eq, params)
    d = time_weights(eq.years, spec, params, dataset.year_max)
    terms = loglik_terms(eq, eps, d, params)
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        raise EstimationError(
            f"non-finite likelihood term for country {eq.iso3s[bad[0]]}"
        )
    return float(np.sum(terms))


def variance_share(params: FrontierParams) -> float:
    """Inefficiency share of total variance; equals theta in this parametrization."""
    params.validate()
    return params.theta
