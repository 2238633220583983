"""Maximum-likelihood fitting of the frontier model.

The constrained parameters are mapped to an unconstrained search space
(log variance, logit share), searched by quasi-Newton iterations with
central-difference gradients and a simplex fallback, from a deterministic
multi-start grid seeded at the OLS solution. The reported optimum carries
a numerical Hessian in the original parametrization for inference.

Unconstrained vector layout (fixed ordering):

    [alpha, beta_1..beta_6, gamma_1, log sigma2, logit theta, mu, eta]

Under the half-normal distribution mu is pinned to 0 and under the
time-invariant model eta is pinned to 0; pinned components are excluded
from the search but kept in the layout.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit, log_ndtr
from scipy.stats import norm

from . import _kernels
from .errors import EstimationError, ParameterError
from .model import (Distribution, FrontierParams, FrontierSpec, TimeModel,
                    loglik_panel)
from .ols import fit_ols
from .panel import CULTURE_DIMS, N_INPUTS, PanelDataset

PARAM_LAYOUT = ("constant",) + CULTURE_DIMS + ("gdp_level", "sigma2", "theta", "mu", "eta")
_IDX_SIGMA2 = 8
_IDX_THETA = 9
_IDX_MU = 10
_IDX_ETA = 11
N_PARAMS = len(PARAM_LAYOUT)

_THETA_CLIP = 1e-12
_SIGMA2_MIN = 1e-300

# center of the start grid first, then the corners; mu column drops to {0}
# under the half-normal model
_START_GRID = (
    (0.8, 0.5), (0.5, 0.0), (0.95, 1.0), (0.8, 1.0), (0.5, 0.5),
    (0.95, 0.0), (0.8, 0.0), (0.5, 1.0), (0.95, 0.5),
)


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 500
    gradient_tolerance: float = 1e-5
    step_tolerance: float = 1e-9
    starts: int = 9
    seed: int = 0

    def __post_init__(self):
        if self.gradient_tolerance <= 0 or self.step_tolerance <= 0:
            raise ParameterError("tolerances must be positive")
        if self.starts < 1:
            raise ParameterError("starts must be >= 1")


@dataclass(frozen=True)
class FitResult:
    spec: FrontierSpec
    params: FrontierParams
    loglik: float
    converged: bool
    iterations: int
    start_index: int
    param_names: tuple  # free parameters, original parametrization
    estimates: np.ndarray  # free-parameter values matching param_names
    hessian: np.ndarray  # of the log-likelihood w.r.t. estimates
    condition_flag: bool
    gradient_max_norm: float
    n_obs: int
    n_countries: int


# ---------------------------------------------------------------------------
# parameter transforms
# ---------------------------------------------------------------------------

def to_unconstrained(params: FrontierParams) -> np.ndarray:
    """Map a valid parameter vector to the unconstrained search space."""
    params.validate()
    return np.concatenate([
        [params.alpha], params.beta, params.gamma,
        [math.log(params.sigma2), float(logit(params.theta)), params.mu, params.eta],
    ])


def from_unconstrained(vector: np.ndarray) -> FrontierParams:
    """Inverse of ``to_unconstrained``; always yields valid parameters.

    The share and variance are clipped away from their open boundaries so
    that arbitrarily large search steps still map into the valid domain.
    """
    vector = np.asarray(vector, dtype=float)
    if vector.shape != (N_PARAMS,) or not np.all(np.isfinite(vector)):
        raise ParameterError(f"expected {N_PARAMS} finite components")
    sigma2 = max(math.exp(min(vector[_IDX_SIGMA2], 690.0)), _SIGMA2_MIN)
    theta = float(np.clip(expit(vector[_IDX_THETA]), _THETA_CLIP, 1.0 - _THETA_CLIP))
    return FrontierParams(
        alpha=float(vector[0]),
        beta=vector[1:1 + N_INPUTS].copy(),
        gamma=vector[1 + N_INPUTS:_IDX_SIGMA2].copy(),
        sigma2=sigma2,
        theta=theta,
        mu=float(vector[_IDX_MU]),
        eta=float(vector[_IDX_ETA]),
    )


def numerical_gradient(f, x: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference gradient with per-coordinate steps h*max(1, |x_k|)."""
    x = np.asarray(x, dtype=float)
    grad = np.empty(x.size)
    for k in range(x.size):
        hk = h * max(1.0, abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += hk
        xm[k] -= hk
        fp, fm = f(xp), f(xm)
        if not (math.isfinite(fp) and math.isfinite(fm)):
            raise EstimationError(f"non-finite objective near coordinate {k}")
        grad[k] = (fp - fm) / (2.0 * hk)
    return grad


# ---------------------------------------------------------------------------
# starting values
# ---------------------------------------------------------------------------

def _mean_truncated(mu, sigma_u):
    # E[u] for N(mu, sigma_u^2) truncated at zero
    z = mu / sigma_u
    return mu + sigma_u * math.exp(norm.logpdf(z) - log_ndtr(z))

def _start_params(ols, theta, mu, spec: FrontierSpec) -> FrontierParams:
    resid_var = float(np.var(ols.residuals))
    sigma2 = max(resid_var * 1.2, 1e-8)
    sigma_u = math.sqrt(theta * sigma2)
    shift = _mean_truncated(mu, sigma_u)
    return FrontierParams(
        alpha=float(ols.beta_ols[0]) + shift,
        beta=ols.beta_ols[1:1 + N_INPUTS].copy(),
        gamma=ols.beta_ols[1 + N_INPUTS:].copy(),
        sigma2=sigma2,
        theta=theta,
        mu=mu if spec.distribution is Distribution.TRUNCATED_NORMAL else 0.0,
        eta=0.0,
    )


def _start_list(ols, spec: FrontierSpec, options: FitOptions, warm_start):
    if spec.distribution is Distribution.TRUNCATED_NORMAL:
        grid = list(_START_GRID)
    else:
        grid = [(th, 0.0) for th, mu in _START_GRID if mu == 0.0]
    starts = []
    if warm_start is not None:
        starts.append(warm_start)
    starts.extend(_start_params(ols, th, mu, spec) for th, mu in grid)
    if len(starts) >= options.starts:
        return starts[:options.starts]
    # extend deterministically with jittered copies of the grid starts
    rng = np.random.default_rng(options.seed)
    base = starts[-len(grid):]
    k = 0
    while len(starts) < options.starts:
        p = base[k % len(base)]
        vec = to_unconstrained(p)
        vec[:_IDX_SIGMA2] += rng.normal(0.0, 0.1, _IDX_SIGMA2)
        vec[_IDX_SIGMA2] += rng.normal(0.0, 0.3)
        vec[_IDX_THETA] += rng.normal(0.0, 0.3)
        if spec.distribution is Distribution.TRUNCATED_NORMAL:
            vec[_IDX_MU] += rng.normal(0.0, 0.3)
        jittered = from_unconstrained(vec)
        starts.append(jittered)
        k += 1
    return starts


# ---------------------------------------------------------------------------
# objective and search
# ---------------------------------------------------------------------------

def _free_indices(spec: FrontierSpec):
    free = list(range(_IDX_THETA + 1))
    if spec.distribution is Distribution.TRUNCATED_NORMAL:
        free.append(_IDX_MU)
    if spec.time_model is TimeModel.TIME_DECAY:
        free.append(_IDX_ETA)
    return np.array(free, dtype=np.intp)


def _make_objective(dataset: PanelDataset, spec: FrontierSpec, free_idx):
    eq = dataset.equation(spec.output_index)
    year_offset = eq.years.astype(float) - dataset.year_max
    decay = spec.time_model is TimeModel.TIME_DECAY
    ones = np.ones(eq.n_obs)
    template = np.zeros(N_PARAMS)

    def neg_ll(xfree):
        full = template.copy()
        full[free_idx] = xfree
        sigma2 = math.exp(min(full[_IDX_SIGMA2], 690.0))
        theta = float(np.clip(expit(full[_IDX_THETA]), _THETA_CLIP, 1.0 - _THETA_CLIP))
        sigma_v2 = (1.0 - theta) * sigma2
        sigma_u2 = theta * sigma2
        if not (sigma_v2 > 0 and sigma_u2 > 0 and math.isfinite(sigma2)):
            return math.inf
        eps = eq.y - full[0] - eq.x @ full[1:1 + N_INPUTS] - full[1 + N_INPUTS] * eq.z
        d = np.exp(-full[_IDX_ETA] * year_offset) if decay else ones
        terms = _kernels.loglik_by_country(
            eps, d, eq.offsets, sigma_v2, sigma_u2, full[_IDX_MU]
        )
        total = float(np.sum(terms))
        return -total if math.isfinite(total) else math.inf

    return neg_ll


# step for optimizer-internal gradients: large enough that objective
# rounding noise (a few ulps of |loglik|) stays well under the 1e-5
# certification tolerance, small enough that truncation error does too
_GRAD_H = 1e-5


def _safe_gradient(f, x, h=_GRAD_H):
    try:
        return numerical_gradient(f, x, h)
    except EstimationError:
        return np.full(len(x), np.nan)


def _numerical_hessian(f, x, steps):
    """Central second differences with prescribed per-coordinate steps."""
    p = x.size
    f0 = f(x)
    hess = np.empty((p, p))
    for a in range(p):
        ha = steps[a]
        vp, vm = x.copy(), x.copy()
        vp[a] += ha
        vm[a] -= ha
        hess[a, a] = (f(vp) - 2.0 * f0 + f(vm)) / ha**2
        for b in range(a + 1, p):
            hb = steps[b]
            vpp, vpm, vmp, vmm = x.copy(), x.copy(), x.copy(), x.copy()
            vpp[[a, b]] += [ha, hb]
            vpm[a] += ha
            vpm[b] -= hb
            vmp[a] -= ha
            vmp[b] += hb
            vmm[[a, b]] -= [ha, hb]
            hess[a, b] = hess[b, a] = (
                (f(vpp) - f(vpm) - f(vmp) + f(vmm)) / (4.0 * ha * hb)
            )
    return hess


def _newton_polish(neg_ll, x, options: FitOptions):
    """Push the gradient below tolerance once line searches stop paying.

    Near the optimum the objective's rounding noise can exceed the descent
    a line search needs to observe, stalling quasi-Newton iterations at a
    gradient norm of ~1e-4. Full Newton steps from a fresh numerical
    Hessian do not need an observable f-decrease and converge
    quadratically from the stall point.
    """
    for _ in range(4):
        grad = _safe_gradient(neg_ll, x)
        if not np.all(np.isfinite(grad)):
            break
        gmax = float(np.max(np.abs(grad)))
        if gmax <= options.gradient_tolerance:
            break
        steps = 1e-4 * np.maximum(1.0, np.abs(x))
        hess = _numerical_hessian(neg_ll, x, steps)
        try:
            delta = np.linalg.solve(hess, -grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(delta)):
            break
        f0 = neg_ll(x)
        accepted = False
        for frac in (1.0, 0.5, 0.25):
            candidate = x + frac * delta
            f1 = neg_ll(candidate)
            g1 = _safe_gradient(neg_ll, candidate)
            if (math.isfinite(f1) and np.all(np.isfinite(g1))
                    and f1 <= f0 + 1e-9 * max(1.0, abs(f0))
                    and float(np.max(np.abs(g1))) < gmax):
                x = candidate
                accepted = True
                break
        if not accepted:
            break
    return x


def _run_single_start(neg_ll, x0, options: FitOptions):
    grad = lambda x: _safe_gradient(neg_ll, x)
    res = minimize(neg_ll, x0, method="BFGS", jac=grad,
                   options={"gtol": options.gradient_tolerance,
                            "maxiter": options.max_iterations})
    x, fval, nit = res.x, res.fun, res.nit
    gmax = float(np.max(np.abs(grad(x))))
    if not math.isfinite(fval) or gmax > options.gradient_tolerance:
        # quasi-Newton stalled; restart the line search from a simplex solution
        nm = minimize(neg_ll, x, method="Nelder-Mead",
                      options={"maxiter": 400 * len(x),
                               "xatol": 1e-10,
                               "fatol": options.step_tolerance * max(1.0, abs(fval) if math.isfinite(fval) else 1.0)})
        if nm.fun <= fval or not math.isfinite(fval):
            x, fval = nm.x, nm.fun
            nit += nm.nit
        res2 = minimize(neg_ll, x, method="BFGS", jac=grad,
                        options={"gtol": options.gradient_tolerance,
                                 "maxiter": options.max_iterations})
        if res2.fun <= fval:
            x, fval = res2.x, res2.fun
            nit += res2.nit
        gmax = float(np.max(np.abs(grad(x))))
    if math.isfinite(fval) and gmax > options.gradient_tolerance:
        x = _newton_polish(neg_ll, x, options)
        fval = neg_ll(x)
        gmax = float(np.max(np.abs(grad(x))))
    converged = math.isfinite(fval) and gmax <= options.gradient_tolerance
    return x, -fval, converged, nit, gmax


def fit_mle(dataset: PanelDataset, spec: FrontierSpec,
            options: FitOptions = FitOptions(),
            warm_start: FrontierParams | None = None) -> FitResult:
    """Maximize the panel log-likelihood; deterministic given the seed.

    Multi-start: OLS-based starting values over a (theta, mu) grid, the
    best converged run wins (ties broken by start index). Time-decay fits
    without an explicit warm start first solve the time-invariant model
    and restart from its optimum with eta = 0.
    """
    ols = fit_ols(dataset, spec.output_index)

    if spec.time_model is TimeModel.TIME_DECAY and warm_start is None:
        ti_spec = FrontierSpec(spec.output_index, spec.distribution,
                               TimeModel.TIME_INVARIANT)
        warm_start = fit_mle(dataset, ti_spec, options).params

    free_idx = _free_indices(spec)
    neg_ll = _make_objective(dataset, spec, free_idx)
    starts = _start_list(ols, spec, options, warm_start)

    runs = []
    start_logliks = []
    for s_idx, start in enumerate(starts):
        x0 = to_unconstrained(start)[free_idx]
        ll0 = -neg_ll(x0)
        if math.isfinite(ll0):
            start_logliks.append(ll0)
        try:
            x, ll, conv, nit, gmax = _run_single_start(neg_ll, x0, options)
        except (ValueError, FloatingPointError) as exc:
            runs.append({"start_index": s_idx, "converged": False,
                         "loglik": -math.inf, "message": str(exc)})
            continue
        if ll < ll0 - 1e-6:
            conv = False  # final point must not be worse than its start
        runs.append({"start_index": s_idx, "converged": conv, "loglik": ll,
                     "x": x, "iterations": nit, "gradient_max_norm": gmax})

    best = None
    for run in runs:
        if run["converged"] and (best is None or run["loglik"] > best["loglik"]):
            best = run
    if best is not None and start_logliks and best["loglik"] < max(start_logliks) - 1e-6:
        best = None  # a failed start began above the best optimum found
    if best is None:
        detail = "; ".join(
            f"start {r['start_index']}: ll={r['loglik']:.6g}"
            + (f" gmax={r['gradient_max_norm']:.3g}" if "gradient_max_norm" in r else "")
            + (f" ({r['message']})" if "message" in r else "")
            for r in runs
        )
        raise EstimationError(f"no start converged for output "
                              f"{spec.output_index}: {detail}")

    full = np.zeros(N_PARAMS)
    full[free_idx] = best["x"]
    params = from_unconstrained(full)
    if spec.distribution is Distribution.HALF_NORMAL:
        params = FrontierParams(params.alpha, params.beta, params.gamma,
                                params.sigma2, params.theta, 0.0, params.eta)
    if spec.time_model is TimeModel.TIME_INVARIANT:
        params = FrontierParams(params.alpha, params.beta, params.gamma,
                                params.sigma2, params.theta, params.mu, 0.0)

    names = tuple(PARAM_LAYOUT[i] for i in free_idx)
    estimates = _original_vector(params)[free_idx]
    hessian = _hessian_original(dataset, spec, params, free_idx)
    condition_flag = _is_ill_conditioned(hessian)
    eq = dataset.equation(spec.output_index)
    return FitResult(
        spec=spec,
        params=params,
        loglik=best["loglik"],
        converged=True,
        iterations=int(best["iterations"]),
        start_index=int(best["start_index"]),
        param_names=names,
        estimates=estimates,
        hessian=hessian,
        condition_flag=condition_flag,
        gradient_max_norm=float(best["gradient_max_norm"]),
        n_obs=eq.n_obs,
        n_countries=eq.n_countries,
    )


# ---------------------------------------------------------------------------
# Hessian in the original parametrization
# ---------------------------------------------------------------------------

def _original_vector(params: FrontierParams) -> np.ndarray:
    return np.concatenate([
        [params.alpha], params.beta, params.gamma,
        [params.sigma2, params.theta, params.mu, params.eta],
    ])


def _params_from_original(vector) -> FrontierParams:
    return FrontierParams(
        alpha=float(vector[0]),
        beta=np.asarray(vector[1:1 + N_INPUTS], dtype=float),
        gamma=np.asarray(vector[1 + N_INPUTS:_IDX_SIGMA2], dtype=float),
        sigma2=float(vector[_IDX_SIGMA2]),
        theta=float(vector[_IDX_THETA]),
        mu=float(vector[_IDX_MU]),
        eta=float(vector[_IDX_ETA]),
    )


def _hessian_step(full, idx):
    h = 1.22e-4 * max(1.0, abs(full[idx]))
    if idx == _IDX_THETA:
        h = min(h, 0.45 * min(full[idx], 1.0 - full[idx]))
    elif idx == _IDX_SIGMA2:
        h = min(h, 0.45 * full[idx])
    return h


def _hessian_original(dataset, spec, params: FrontierParams, free_idx) -> np.ndarray:
    """Central second differences of the log-likelihood at the optimum."""
    base = _original_vector(params)

    def f(free_vec):
        vec = base.copy()
        vec[free_idx] = free_vec
        return loglik_panel(dataset, spec, _params_from_original(vec))

    steps = np.array([_hessian_step(base, i) for i in free_idx])
    return _numerical_hessian(f, base[free_idx].copy(), steps)


def _is_ill_conditioned(hessian: np.ndarray) -> bool:
    try:
        eigs = np.linalg.eigvalsh(-hessian)
    except np.linalg.LinAlgError:
        return True
    if np.any(eigs <= 0):
        return True
    return bool(eigs.max() / eigs.min() > 1e8)
