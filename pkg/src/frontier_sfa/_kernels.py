"""Hot numerical kernels for the panel frontier likelihood.

Two interchangeable backends compute the per-country likelihood terms and
posterior moments over a CSR-like layout (stacked residuals plus country
offsets): a numba ``@njit`` loop and a vectorized pure-numpy path. The
active backend is chosen at import time:

    FRONTIER_SFA_BACKEND=numba   force the compiled kernels
    FRONTIER_SFA_BACKEND=numpy   force the pure-numpy fallback
    (unset)                      numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` times the two against each other. Both
backends must agree to ~1e-13; tests/test_kernels.py enforces this.

The normal log-CDF used inside the numba kernels is a self-contained
reimplementation (erfc for moderate arguments, upper-tail asymptotic
series below -14) because scipy.special is not callable from nopython
code. It is finite for arguments far below the -38 stability floor the
likelihood requires.
"""

import math
import os

import numpy as np
from scipy.special import log_ndtr

_LOG_2PI = math.log(2.0 * math.pi)
_SQRT1_2 = math.sqrt(0.5)


def _choose_backend() -> str:
    choice = os.environ.get("FRONTIER_SFA_BACKEND", "").strip().lower()
    if choice not in ("", "numba", "numpy"):
        raise ValueError(
            f"FRONTIER_SFA_BACKEND must be 'numba' or 'numpy', got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise ImportError("FRONTIER_SFA_BACKEND=numba but numba is not installed")
        return "numpy"
    return "numba"


BACKEND = _choose_backend()


# ---------------------------------------------------------------------------
# pure-numpy backend
# ---------------------------------------------------------------------------

def _country_sums_np(eps, d, offsets):
    t_i = np.diff(offsets)
    ids = np.repeat(np.arange(t_i.size), t_i)
    s_d2 = np.bincount(ids, weights=d * d, minlength=t_i.size)
    s_de = np.bincount(ids, weights=d * eps, minlength=t_i.size)
    s_e2 = np.bincount(ids, weights=eps * eps, minlength=t_i.size)
    return t_i, s_d2, s_de, s_e2


def loglik_by_country_np(eps, d, offsets, sigma_v2, sigma_u2, mu):
    """Per-country log-likelihood terms, vectorized numpy implementation."""
    t_i, s_d2, s_de, s_e2 = _country_sums_np(eps, d, offsets)
    a = sigma_v2 + sigma_u2 * s_d2
    sigma_star2 = sigma_u2 * sigma_v2 / a
    mu_star = (mu * sigma_v2 - sigma_u2 * s_de) / a
    z = mu_star / np.sqrt(sigma_star2)
    return (
        -0.5 * t_i * _LOG_2PI
        - 0.5 * (t_i - 1) * math.log(sigma_v2)
        - 0.5 * np.log(a)
        + log_ndtr(z)
        - log_ndtr(mu / math.sqrt(sigma_u2))
        - 0.5 * (s_e2 / sigma_v2 + mu * mu / sigma_u2 - mu_star * mu_star / sigma_star2)
    )


def posterior_by_country_np(eps, d, offsets, sigma_v2, sigma_u2, mu):
    """Per-country conditional moments (mu_star, sigma_star), numpy."""
    _, s_d2, s_de, _ = _country_sums_np(eps, d, offsets)
    a = sigma_v2 + sigma_u2 * s_d2
    sigma_star = np.sqrt(sigma_u2 * sigma_v2 / a)
    mu_star = (mu * sigma_v2 - sigma_u2 * s_de) / a
    return mu_star, sigma_star


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

loglik_by_country_nb = None
posterior_by_country_nb = None
log_ndtr_nb = None

try:
    from numba import njit, vectorize
except ImportError:  # pragma: no cover - numba is a hard dependency in practice
    njit = None

if njit is not None:

    @njit(cache=True)
    def _log_ndtr_scalar(x):
        # erfc is accurate down to x ~ -37 but the plain log underflows much
        # earlier in intermediate form; switch to the upper-tail series at -14
        # (same scheme as the cephes implementation scipy wraps).
        if x > 6.0:
            return math.log1p(-0.5 * math.erfc(x * _SQRT1_2))
        if x > -14.0:
            return math.log(0.5 * math.erfc(-x * _SQRT1_2))
        # log Phi(x) = -x^2/2 - log(-x) - log(2 pi)/2 + log(series),
        # series = 1 - 1/x^2 + 3/x^4 - 15/x^6 + ... (asymptotic Mills ratio)
        inv_x2 = 1.0 / (x * x)
        total = 1.0
        term = 1.0
        sign = 1.0
        numerator = 1.0
        for i in range(1, 60):
            sign = -sign
            numerator *= 2.0 * i - 1.0
            term *= inv_x2
            delta = sign * numerator * term
            new_total = total + delta
            if new_total == total:
                break
            total = new_total
        return -0.5 * x * x - math.log(-x) - 0.5 * _LOG_2PI + math.log(total)

    @vectorize(["float64(float64)"], cache=True)
    def log_ndtr_nb(x):
        return _log_ndtr_scalar(x)

    @njit(cache=True)
    def loglik_by_country_nb(eps, d, offsets, sigma_v2, sigma_u2, mu):
        n = offsets.size - 1
        out = np.empty(n)
        log_prior_cdf = _log_ndtr_scalar(mu / math.sqrt(sigma_u2))
        log_sv2 = math.log(sigma_v2)
        for i in range(n):
            lo = offsets[i]
            hi = offsets[i + 1]
            s_d2 = 0.0
            s_de = 0.0
            s_e2 = 0.0
            for k in range(lo, hi):
                s_d2 += d[k] * d[k]
                s_de += d[k] * eps[k]
                s_e2 += eps[k] * eps[k]
            t_i = hi - lo
            a = sigma_v2 + sigma_u2 * s_d2
            sigma_star2 = sigma_u2 * sigma_v2 / a
            mu_star = (mu * sigma_v2 - sigma_u2 * s_de) / a
            z = mu_star / math.sqrt(sigma_star2)
            out[i] = (
                -0.5 * t_i * _LOG_2PI
                - 0.5 * (t_i - 1) * log_sv2
                - 0.5 * math.log(a)
                + _log_ndtr_scalar(z)
                - log_prior_cdf
                - 0.5 * (s_e2 / sigma_v2 + mu * mu / sigma_u2 - mu_star * mu_star / sigma_star2)
            )
        return out

    @njit(cache=True)
    def posterior_by_country_nb(eps, d, offsets, sigma_v2, sigma_u2, mu):
        n = offsets.size - 1
        mu_star = np.empty(n)
        sigma_star = np.empty(n)
        for i in range(n):
            lo = offsets[i]
            hi = offsets[i + 1]
            s_d2 = 0.0
            s_de = 0.0
            for k in range(lo, hi):
                s_d2 += d[k] * d[k]
                s_de += d[k] * eps[k]
            a = sigma_v2 + sigma_u2 * s_d2
            sigma_star[i] = math.sqrt(sigma_u2 * sigma_v2 / a)
            mu_star[i] = (mu * sigma_v2 - sigma_u2 * s_de) / a
        return mu_star, sigma_star


if BACKEND == "numba":
    loglik_by_country = loglik_by_country_nb
    posterior_by_country = posterior_by_country_nb
else:
    loglik_by_country = loglik_by_country_np
    posterior_by_country = posterior_by_country_np
