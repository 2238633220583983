"""Synthetic panels with retained latents, plus the two independent oracles.

The generator simulates the frontier model forward:

    y_it = alpha + sum_k beta_k x_ik + gamma z_it - d_it u_i + v_it

keeping (u_i, v_it) so that tests can compare estimates against the truth.
RNG streams: the seed feeds a SeedSequence whose first child drives the
covariates and whose remaining children are spawned one per country (u_i
first, then that country's v_it), so per-country generation is independent
of scheduling and bit-reproducible.

Two oracles certify the closed forms elsewhere in the package without
sharing any likelihood code path:

    quadrature_loglik   integrates the inefficiency variable out of the
                        joint density by adaptive quadrature (small
                        instances only)
    mc_conditional      self-normalized importance sampling of E[u | eps]
                        and E[exp(-u) | eps] with the prior as proposal
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar
from scipy.special import ndtr, ndtri

from .errors import OracleError, ParameterError
from .model import FrontierParams, FrontierSpec, TimeModel
from .panel import (CULTURE_DIMS, INDICATORS, N_INPUTS, N_OUTPUTS,
                    PanelDataset, gdp_level, scale_culture)

# years of the application sample: 1996-2019 minus 1997, 1999, 2001
DEFAULT_YEARS = tuple(y for y in range(1996, 2020) if y not in (1997, 1999, 2001))

_LOG_2PI = math.log(2.0 * math.pi)

# raw-scale culture moments and cross-correlations used by the "correlated"
# covariate source; chosen to mimic the published score sheets so synthetic
# design matrices carry comparable collinearity
_CULTURE_MEAN = np.array([60.0, 45.0, 49.0, 65.0, 45.0, 47.0])
_CULTURE_SD = np.array([22.0, 24.0, 19.0, 23.0, 24.0, 22.0])
_CULTURE_CORR = np.array([
    [1.00, -0.65, 0.10, 0.20, 0.05, -0.30],
    [-0.65, 1.00, 0.05, -0.25, 0.15, 0.15],
    [0.10, 0.05, 1.00, 0.10, 0.05, 0.05],
    [0.20, -0.25, 0.10, 1.00, 0.00, -0.15],
    [0.05, 0.15, 0.05, 0.00, 1.00, -0.45],
    [-0.30, 0.15, 0.05, -0.15, -0.45, 1.00],
])


@dataclass(frozen=True)
class SyntheticPanel:
    dataset: PanelDataset
    latent_u: np.ndarray  # (N,)
    latent_v: np.ndarray  # (n_obs,) aligned with dataset.observations
    truth: FrontierParams
    spec: FrontierSpec
    seed: int


def sample_truncated_normal(mu, sigma, rng, size=None):
    """Draw from N(mu, sigma^2) conditioned on the value being >= 0.

    Rejection sampling when the acceptance probability Phi(mu/sigma) is at
    least 0.1; otherwise exact inverse-CDF sampling on the truncated
    region via the upper tail (well conditioned even for tiny acceptance
    mass).
    """
    if sigma <= 0:
        raise ParameterError("sigma must be positive")
    n = 1 if size is None else int(size)
    accept = float(ndtr(mu / sigma))
    if accept >= 0.1:
        out = np.empty(n)
        filled = 0
        while filled < n:
            need = n - filled
            batch = rng.normal(mu, sigma, size=max(need * 2, 16))
            good = batch[batch >= 0.0][:need]
            out[filled:filled + good.size] = good
            filled += good.size
    else:
        w = 1.0 - rng.uniform(size=n)  # in (0, 1]
        out = mu - sigma * ndtri(w * accept)
        np.maximum(out, 0.0, out=out)
    return float(out[0]) if size is None else out


def generate_covariates(n_countries, years, source, rng):
    """Raw culture scores and a GDP-per-capita panel.

    ``source``: ``"uniform"`` for independent uniform scores, ``"correlated"``
    for Gaussian scores with realistic cross-correlations, or a PanelDataset
    whose country rows are resampled with replacement.

    Returns (culture_raw (N, 6), gdp_pc (N, T) with NaN for absent cells).
    """
    years = np.asarray(years)
    t = years.size
    if isinstance(source, PanelDataset):
        picks = rng.integers(0, source.n_countries, size=n_countries)
        culture_raw = np.array([source.countries[i].culture_raw for i in picks])
        gdp_pc = np.full((n_countries, t), np.nan)
        gdp_lookup = {}
        for k, obs in enumerate(source.observations):
            gdp_lookup[(source.obs_country[k], obs.year)] = obs.gdp_pc
        for i, pick in enumerate(picks):
            for j, year in enumerate(years):
                val = gdp_lookup.get((pick, int(year)))
                if val is not None:
                    gdp_pc[i, j] = val
        return culture_raw, gdp_pc
    if source == "uniform":
        culture_raw = rng.uniform(0.0, 100.0, size=(n_countries, N_INPUTS))
        log_gdp = rng.uniform(7.0, 11.0, size=(n_countries, t))
        return culture_raw, np.exp(log_gdp)
    if source == "correlated":
        chol = np.linalg.cholesky(_CULTURE_CORR)
        shocks = rng.standard_normal((n_countries, N_INPUTS)) @ chol.T
        culture_raw = np.clip(_CULTURE_MEAN + _CULTURE_SD * shocks, 1.0, 112.0)
        base = rng.normal(8.5, 1.3, size=n_countries)
        trend = rng.normal(0.03, 0.02, size=n_countries)
        noise = rng.normal(0.0, 0.04, size=(n_countries, t))
        log_gdp = base[:, None] + trend[:, None] * (years - years[0]) + noise
        return culture_raw, np.exp(log_gdp)
    raise ParameterError(f"unknown covariate source {source!r}")


def _synthetic_iso3(i):
    # S000, S001, ... sorts the same as the country index
    return f"S{i:03d}"


def generate_panel(truth: FrontierParams, spec: FrontierSpec, n_countries: int,
                   years=DEFAULT_YEARS, covariate_source="correlated",
                   seed: int = 0) -> SyntheticPanel:
    """Simulate a panel at known truth; deterministic in the seed.

    The output column named by ``spec.output_index`` carries the simulated
    values in model units (no re-standardization); the other five outputs
    stay missing.
    """
    truth.validate(spec)
    if n_countries < 2:
        raise ParameterError("synthetic panel needs at least 2 countries")
    years = np.asarray(sorted(int(y) for y in years))
    root = np.random.SeedSequence(seed)
    cov_ss, country_parent = root.spawn(2)
    covariate_rng = np.random.Generator(np.random.PCG64(cov_ss))
    country_streams = country_parent.spawn(n_countries)

    culture_raw, gdp_pc = generate_covariates(
        n_countries, years, covariate_source, covariate_rng
    )
    culture_scaled = np.column_stack(
        [scale_culture(culture_raw[:, k]) for k in range(N_INPUTS)]
    )

    obs_country, obs_year, obs_gdp = [], [], []
    latent_u = np.empty(n_countries)
    latent_v_parts = []
    for i in range(n_countries):
        rng_i = np.random.Generator(np.random.PCG64(country_streams[i]))
        latent_u[i] = sample_truncated_normal(truth.mu, truth.sigma_u, rng_i)
        present = np.flatnonzero(~np.isnan(gdp_pc[i]))
        latent_v_parts.append(rng_i.normal(0.0, truth.sigma_v, size=present.size))
        obs_country.extend([i] * present.size)
        obs_year.extend(int(years[j]) for j in present)
        obs_gdp.extend(gdp_pc[i, j] for j in present)

    obs_country = np.array(obs_country, dtype=np.int64)
    obs_year = np.array(obs_year, dtype=np.int64)
    obs_gdp = np.array(obs_gdp, dtype=float)
    latent_v = np.concatenate(latent_v_parts)

    z = gdp_level(obs_gdp, obs_year)
    x = culture_scaled[obs_country]
    year_max = int(years.max())
    if spec.time_model is TimeModel.TIME_DECAY:
        d = np.exp(-truth.eta * (obs_year.astype(float) - year_max))
    else:
        d = np.ones(obs_country.size)
    y = (truth.alpha + x @ truth.beta + truth.gamma[0] * z
         - d * latent_u[obs_country] + latent_v)

    outputs = np.full((obs_country.size, N_OUTPUTS), np.nan)
    outputs[:, spec.output_index - 1] = y

    dataset = PanelDataset.from_arrays(
        [_synthetic_iso3(i) for i in range(n_countries)],
        culture_raw, culture_scaled, obs_country, obs_year, outputs, obs_gdp, z,
    )
    return SyntheticPanel(dataset=dataset, latent_u=latent_u, latent_v=latent_v,
                          truth=truth, spec=spec, seed=seed)


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

def _country_log_integrand(eps_i, d_i, params: FrontierParams):
    sv2 = params.sigma_v2
    su = params.sigma_u
    log_norm = float(np.log(ndtr(params.mu / su)))
    t_i = eps_i.size

    def log_g(u):
        dens_v = -0.5 * t_i * (_LOG_2PI + math.log(sv2)) \
            - float(np.sum((eps_i + d_i * u) ** 2)) / (2.0 * sv2)
        dens_u = (-0.5 * (_LOG_2PI + 2.0 * math.log(su))
                  - (u - params.mu) ** 2 / (2.0 * su * su) - log_norm)
        return dens_v + dens_u

    return log_g


def quadrature_loglik(dataset: PanelDataset, spec: FrontierSpec,
                      params: FrontierParams) -> float:
    """Numerically integrate the inefficiency out of each country's density.

    Restricted to small instances; this is an oracle for the closed-form
    likelihood, not an estimation path.
    """
    params.validate(spec)
    eq = dataset.equation(spec.output_index)
    if eq.n_countries > 10 or np.max(np.diff(eq.offsets)) > 6:
        raise ParameterError("quadrature oracle is restricted to N <= 10, T_i <= 6")
    eps = eq.y - params.alpha - eq.x @ params.beta - eq.z * params.gamma[0]
    if spec.time_model is TimeModel.TIME_DECAY:
        d_all = np.exp(-params.eta * (eq.years.astype(float) - dataset.year_max))
    else:
        d_all = np.ones(eq.n_obs)

    total = 0.0
    for i in range(eq.n_countries):
        sl = slice(eq.offsets[i], eq.offsets[i + 1])
        log_g = _country_log_integrand(eps[sl], d_all[sl], params)
        # the log-integrand is smooth and single-peaked on [0, inf); locate
        # the peak by scan + bounded refinement, then integrate a shifted
        # exponential over a generous window around it
        upper = max(
            1.0,
            params.mu + 12.0 * params.sigma_u,
            float(np.max(-eps[sl] / d_all[sl])) + 12.0 * params.sigma_v / float(np.min(d_all[sl])),
        )
        grid = np.linspace(0.0, upper, 512)
        values = np.array([log_g(u) for u in grid])
        k = int(np.argmax(values))
        lo_b = grid[max(0, k - 2)]
        hi_b = grid[min(grid.size - 1, k + 2)]
        if hi_b > lo_b:
            res = minimize_scalar(lambda u: -log_g(u), bounds=(lo_b, hi_b),
                                  method="bounded", options={"xatol": 1e-12})
            mode, log_peak = float(res.x), -float(res.fun)
        else:
            mode, log_peak = float(grid[k]), float(values[k])
        h = max(1e-5, 1e-5 * abs(mode))
        curv = (log_g(mode + h) - 2.0 * log_g(mode) + log_g(mode - h)) / h**2
        width = 1.0 / math.sqrt(-curv) if curv < 0 else params.sigma_u
        a = max(0.0, mode - 60.0 * width)
        b = mode + 60.0 * width
        integral, abserr = quad(lambda u: math.exp(log_g(u) - log_peak), a, b,
                                epsabs=0.0, epsrel=1e-12, limit=400,
                                points=[mode] if a < mode < b else None)
        if integral <= 0 or abserr > 1e-9 * integral:
            raise OracleError(
                f"quadrature failed for country {eq.iso3s[i]}: "
                f"integral={integral:.3e}, abserr={abserr:.3e}"
            )
        total += log_peak + math.log(integral)
    return total


# ---------------------------------------------------------------------------
# Monte Carlo oracle
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MCConditional:
    e_u: float
    e_exp_neg_u: float
    se_e_u: float
    se_e_exp_neg_u: float
    ess: float


def mc_conditional(moments_inputs, n_draws: int = 200_000, seed: int = 0) -> MCConditional:
    """Importance-sampled E[u | eps] and E[exp(-u) | eps] with Monte Carlo SEs.

    ``moments_inputs`` is ``(eps_i, weights_i, params)`` for one country.
    Draws come from the prior truncated normal, weighted by the noise
    density of the residuals, so no posterior-moment algebra is shared
    with the closed forms under test.
    """
    if n_draws < 100_000:
        raise ParameterError("mc_conditional needs at least 1e5 draws")
    eps_i, weights_i, params = moments_inputs
    params.validate()
    eps_i = np.asarray(eps_i, dtype=float)
    d_i = np.asarray(weights_i, dtype=float)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    u = sample_truncated_normal(params.mu, params.sigma_u, rng, size=n_draws)
    log_w = -np.sum((eps_i[None, :] + np.outer(u, d_i)) ** 2, axis=1) / (2.0 * params.sigma_v2)
    log_w -= log_w.max()
    w = np.exp(log_w)
    w_sum = w.sum()
    ess = float(w_sum**2 / np.sum(w * w))
    if ess < 0.01 * n_draws:
        raise OracleError(
            f"effective sample size {ess:.0f} below 1% of {n_draws} draws"
        )
    w_norm = w / w_sum
    e_u = float(np.sum(w_norm * u))
    g = np.exp(-u)
    e_g = float(np.sum(w_norm * g))
    se_u = float(np.sqrt(np.sum(w_norm**2 * (u - e_u) ** 2)))
    se_g = float(np.sqrt(np.sum(w_norm**2 * (g - e_g) ** 2)))
    return MCConditional(e_u=e_u, e_exp_neg_u=e_g, se_e_u=se_u,
                         se_e_exp_neg_u=se_g, ess=ess)
