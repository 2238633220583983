import numpy as np
import pytest
from scipy.special import log_ndtr

from frontier_sfa import _kernels

pytestmark = pytest.mark.skipif(
    _kernels.loglik_by_country_nb is None, reason="numba not installed"
)


def _random_layout(rng, n_countries=8, t_max=5):
    counts = rng.integers(1, t_max + 1, size=n_countries)
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    eps = rng.normal(0.0, 0.7, size=offsets[-1])
    d = np.exp(rng.uniform(-0.3, 0.3, size=offsets[-1]))
    return eps, d, offsets


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_backends_agree_on_loglik(seed):
    rng = np.random.default_rng(seed)
    eps, d, offsets = _random_layout(rng)
    sigma_v2 = rng.uniform(0.02, 0.5)
    sigma_u2 = rng.uniform(0.02, 0.5)
    mu = rng.uniform(-1.0, 1.5)
    a = _kernels.loglik_by_country_nb(eps, d, offsets, sigma_v2, sigma_u2, mu)
    b = _kernels.loglik_by_country_np(eps, d, offsets, sigma_v2, sigma_u2, mu)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_backends_agree_on_posterior(seed):
    rng = np.random.default_rng(seed)
    eps, d, offsets = _random_layout(rng)
    ma, sa = _kernels.posterior_by_country_nb(eps, d, offsets, 0.1, 0.3, 0.5)
    mb, sb = _kernels.posterior_by_country_np(eps, d, offsets, 0.1, 0.3, 0.5)
    np.testing.assert_allclose(ma, mb, rtol=0, atol=1e-13)
    np.testing.assert_allclose(sa, sb, rtol=0, atol=1e-13)


def test_log_ndtr_matches_scipy_over_wide_range():
    x = np.concatenate([
        np.linspace(-60.0, 10.0, 4001),
        [-38.0, -14.0001, -14.0, -13.9999, -8.0, 0.0, 5.9999, 6.0, 6.0001],
    ])
    mine = _kernels.log_ndtr_nb(x)
    ref = log_ndtr(x)
    assert np.all(np.abs(mine - ref) <= 1e-12 * (1.0 + np.abs(ref)))


def test_log_ndtr_finite_deep_into_the_tail():
    x = np.array([-38.0, -100.0, -500.0])
    vals = _kernels.log_ndtr_nb(x)
    assert np.all(np.isfinite(vals))
    assert np.all(np.diff(vals) < 0)


def test_loglik_finite_for_extreme_posterior_arguments():
    # large positive residual sums push mu*/sigma* far below -38
    eps = np.full(4, 40.0)
    d = np.ones(4)
    offsets = np.array([0, 4], dtype=np.int64)
    for fn in (_kernels.loglik_by_country_nb, _kernels.loglik_by_country_np):
        val = fn(eps, d, offsets, 0.5, 0.5, 0.0)
        assert np.isfinite(val).all()


def test_backend_env_flag_rejects_unknown_value(monkeypatch):
    monkeypatch.setenv("FRONTIER_SFA_BACKEND", "gpu")
    with pytest.raises(ValueError):
        _kernels._choose_backend()
