#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Times the per-country likelihood kernel on an application-sized panel
(94 countries x 21 years) and a one-output MLE fit under each backend.
Run:

    python benchmarks/bench_kernels.py

Force a backend for the fit timing with FRONTIER_SFA_BACKEND; the kernel
microbenchmark always times both implementations directly.
"""

import time

import numpy as np

from frontier_sfa import _kernels
from frontier_sfa.fitting import FitOptions, fit_mle
from frontier_sfa.model import FrontierSpec
from frontier_sfa.reference import ge_truth
from frontier_sfa.synthetic import generate_panel


def time_callable(fn, repeat):
    fn()  # warm-up (JIT compilation for the numba path)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main():
    truth = ge_truth()
    spec = FrontierSpec(3)
    panel = generate_panel(truth, spec, n_countries=94, seed=123)
    eq = panel.dataset.equation(3)
    eps = eq.y - truth.alpha - eq.x @ truth.beta - eq.z * truth.gamma[0]
    d = np.ones(eq.n_obs)
    args = (eps, d, eq.offsets, truth.sigma_v2, truth.sigma_u2, truth.mu)

    repeat = 2000
    rows = [("kernel", "backend", "per call")]
    t_np = time_callable(lambda: _kernels.loglik_by_country_np(*args), repeat)
    rows.append(("loglik_by_country", "numpy", f"{t_np * 1e6:8.1f} us"))
    if _kernels.loglik_by_country_nb is not None:
        t_nb = time_callable(lambda: _kernels.loglik_by_country_nb(*args), repeat)
        rows.append(("loglik_by_country", "numba", f"{t_nb * 1e6:8.1f} us"))
        rows.append(("loglik_by_country", "speedup", f"{t_np / t_nb:8.1f} x"))

    t_np = time_callable(lambda: _kernels.posterior_by_country_np(*args), repeat)
    rows.append(("posterior_by_country", "numpy", f"{t_np * 1e6:8.1f} us"))
    if _kernels.posterior_by_country_nb is not None:
        t_nb = time_callable(lambda: _kernels.posterior_by_country_nb(*args), repeat)
        rows.append(("posterior_by_country", "numba", f"{t_nb * 1e6:8.1f} us"))
        rows.append(("posterior_by_country", "speedup", f"{t_np / t_nb:8.1f} x"))

    for name, backend, value in rows:
        print(f"{name:22} {backend:8} {value}")

    print(f"\nactive backend: {_kernels.BACKEND}")
    t0 = time.perf_counter()
    fit = fit_mle(panel.dataset, spec, FitOptions(starts=3, seed=0))
    print(f"fit_mle (94 countries, 3 starts): {time.perf_counter() - t0:.2f} s, "
          f"loglik={fit.loglik:.3f}")


if __name__ == "__main__":
    main()
