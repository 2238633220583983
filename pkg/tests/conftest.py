import numpy as np
import pytest

from frontier_sfa.model import Distribution, FrontierParams, FrontierSpec, TimeModel
from frontier_sfa.panel import N_INPUTS, N_OUTPUTS, PanelDataset, gdp_level
from frontier_sfa.reference import ge_truth
from frontier_sfa.synthetic import sample_truncated_normal


@pytest.fixture
def truth_ge():
    return ge_truth()


@pytest.fixture
def spec_ge():
    return FrontierSpec(3)


def random_params(rng, distribution=Distribution.TRUNCATED_NORMAL,
                  time_model=TimeModel.TIME_INVARIANT):
    return FrontierParams(
        alpha=rng.uniform(-1.0, 1.0),
        beta=rng.uniform(-1.0, 1.0, N_INPUTS),
        gamma=np.array([rng.uniform(-0.5, 0.5)]),
        sigma2=rng.uniform(0.05, 0.6),
        theta=rng.uniform(0.15, 0.9),
        mu=rng.uniform(-0.5, 1.2) if distribution is Distribution.TRUNCATED_NORMAL else 0.0,
        eta=rng.uniform(-0.05, 0.05) if time_model is TimeModel.TIME_DECAY else 0.0,
    )


def make_instance(rng, n_countries=4, t_max=4, output_index=1,
                  distribution=Distribution.TRUNCATED_NORMAL,
                  time_model=TimeModel.TIME_INVARIANT, params=None):
    """Small unbalanced panel with outputs drawn from the frontier model.

    Returns (dataset, spec, params). Residuals are genuine composed errors
    so posterior arguments stay in a realistic range.
    """
    spec = FrontierSpec(output_index, distribution, time_model)
    if params is None:
        params = random_params(rng, distribution, time_model)
    counts = rng.integers(1, t_max + 1, size=n_countries)
    all_years = 2000 + np.arange(t_max)
    year_max = int(all_years.max())

    culture_scaled = rng.uniform(0.0, 1.0, size=(n_countries, N_INPUTS))
    obs_country, obs_year = [], []
    for i, c in enumerate(counts):
        chosen = np.sort(rng.choice(all_years, size=c, replace=False))
        obs_country.extend([i] * c)
        obs_year.extend(int(y) for y in chosen)
    obs_country = np.array(obs_country, dtype=np.int64)
    obs_year = np.array(obs_year, dtype=np.int64)
    n_obs = obs_country.size

    gdp_pc = np.exp(rng.normal(8.5, 1.0, size=n_obs))
    z = gdp_level(gdp_pc, obs_year)
    x = culture_scaled[obs_country]
    if time_model is TimeModel.TIME_DECAY:
        d = np.exp(-params.eta * (obs_year.astype(float) - year_max))
    else:
        d = np.ones(n_obs)
    u = np.array([
        sample_truncated_normal(params.mu, params.sigma_u, rng)
        for _ in range(n_countries)
    ])
    v = rng.normal(0.0, params.sigma_v, size=n_obs)
    y = (params.alpha + x @ params.beta + params.gamma[0] * z
         - d * u[obs_country] + v)

    outputs = np.full((n_obs, N_OUTPUTS), np.nan)
    outputs[:, output_index - 1] = y
    dataset = PanelDataset.from_arrays(
        [f"S{i:03d}" for i in range(n_countries)],
        culture_scaled * 100.0, culture_scaled, obs_country, obs_year,
        outputs, gdp_pc, z,
    )
    return dataset, spec, params


def write_panel_csvs(tmp_path, culture_rows, wgi_rows, gdp_rows):
    """Write the three input files from row tuples; returns their paths."""
    culture = tmp_path / "culture.csv"
    wgi = tmp_path / "wgi.csv"
    gdp = tmp_path / "gdp.csv"
    culture.write_text(
        "iso3,pdi,idv,mas,uai,lto,ivr\n"
        + "".join(",".join(str(v) for v in row) + "\n" for row in culture_rows)
    )
    wgi.write_text(
        "iso3,year,indicator,value\n"
        + "".join(",".join(str(v) for v in row) + "\n" for row in wgi_rows)
    )
    gdp.write_text(
        "iso3,year,gdp_pc_usd\n"
        + "".join(",".join(str(v) for v in row) + "\n" for row in gdp_rows)
    )
    return culture, wgi, gdp
