import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frontier_sfa.errors import DataError
from frontier_sfa.panel import (INDICATORS, IngestConfig, gdp_level,
                                load_panel, scale_culture,
                                standardize_outputs)
from frontier_sfa.synthetic import DEFAULT_YEARS

from .conftest import write_panel_csvs


class TestScaleCulture:
    def test_affine_endpoints(self):
        np.testing.assert_allclose(scale_culture([20, 60, 100]), [0.0, 0.5, 1.0])

    def test_identity_on_endpoints(self):
        np.testing.assert_allclose(scale_culture([0, 100]), [0.0, 1.0])

    def test_interior_point(self):
        # (45 - 30) / (90 - 30) = 0.25
        np.testing.assert_allclose(scale_culture([30, 45, 90]), [0.0, 0.25, 1.0])

    def test_constant_dimension_rejected(self):
        with pytest.raises(DataError):
            scale_culture([55, 55, 55])

    @given(st.lists(st.integers(-100, 500), min_size=2, max_size=40, unique=True))
    def test_order_preserving(self, half_points):
        # publisher scores come at >= 0.5-unit resolution
        values = np.asarray(half_points, dtype=float) / 2.0
        scaled = scale_culture(values)
        order = np.argsort(values)
        assert np.all(np.diff(scaled[order]) > 0)
        assert scaled.min() == 0.0 and scaled.max() == 1.0


class TestStandardizeOutputs:
    def test_already_standardized(self):
        np.testing.assert_allclose(standardize_outputs([-1, 0, 1]), [-1, 0, 1],
                                   atol=1e-15)

    def test_zero_variance_rejected(self):
        with pytest.raises(DataError):
            standardize_outputs([2, 2, 2])

    def test_moment_fixture(self):
        # mean 1, sample sd sqrt(3)
        got = standardize_outputs([0.0, 0.0, 3.0])
        np.testing.assert_allclose(
            got, [-0.5773502691896258, -0.5773502691896258, 1.1547005383792515],
            atol=1e-12,
        )

    def test_missing_cells_stay_missing(self):
        got = standardize_outputs([1.0, np.nan, 3.0, 5.0])
        assert np.isnan(got[1])
        assert np.all(~np.isnan(got[[0, 2, 3]]))

    @given(st.lists(st.floats(-100, 100), min_size=3, max_size=50))
    @settings(max_examples=60)
    def test_idempotent(self, values):
        values = np.asarray(values)
        if np.std(values, ddof=1) < 1e-6:
            return
        once = standardize_outputs(values)
        twice = standardize_outputs(once)
        np.testing.assert_allclose(twice, once, atol=1e-10)


class TestGdpLevel:
    def test_equal_gdp_gives_zero_levels(self):
        year = np.array([2000, 2000, 2000])
        np.testing.assert_allclose(gdp_level([5.0, 5.0, 5.0], year), 0.0, atol=1e-15)

    def test_two_country_fixture(self):
        got = gdp_level([1000.0, 2718.2818], np.array([1996, 1996]))
        np.testing.assert_allclose(
            got, [-0.6201144993044618, 0.3798854902260409], atol=1e-12)

    def test_doubling_raises_level_by_less_than_log2(self):
        year = np.array([2000, 2000, 2000])
        base = gdp_level([1000.0, 2000.0, 3000.0], year)
        moved = gdp_level([2000.0, 2000.0, 3000.0], year)
        gain = moved[0] - base[0]
        assert 0.0 < gain < math.log(2.0)

    def test_nonpositive_rejected(self):
        with pytest.raises(DataError):
            gdp_level([1000.0, 0.0], np.array([2000, 2000]))

    @given(st.lists(st.floats(1e2, 1e5), min_size=2, max_size=30))
    @settings(max_examples=60)
    def test_yearly_sum_is_nonpositive(self, gdp):
        year = np.zeros(len(gdp), dtype=int)
        levels = gdp_level(np.asarray(gdp), year)
        assert levels.sum() <= 1e-9
        if np.ptp(gdp) == 0:
            np.testing.assert_allclose(levels.sum(), 0.0, atol=1e-12)


def _three_country_fixture(tmp_path, drop_one_cell=True):
    culture = [("AAA", 40, 50, 60, 70, 30, 20),
               ("BBB", 80, 20, 40, 90, 60, 50),
               ("CCC", 10, 90, 55, 30, 45, 80)]
    wgi = []
    for iso3 in ("AAA", "BBB", "CCC"):
        for year in (2000, 2001):
            for ind in INDICATORS:
                if drop_one_cell and (iso3, year, ind) == ("AAA", 2001, "GE"):
                    continue
                wgi.append((iso3, year, ind, round(hash((iso3, year, ind)) % 400 / 100 - 2, 2)))
    gdp = [(iso3, year, 1000.0 * (i + 1) + 37 * (year - 2000))
           for i, iso3 in enumerate(("AAA", "BBB", "CCC")) for year in (2000, 2001)]
    return write_panel_csvs(tmp_path, culture, wgi, gdp)


class TestLoadPanel:
    def test_missing_cell_shrinks_one_output_only(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        dataset, report = load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))
        assert dataset.n_countries == 3
        assert dataset.n_observations == 6
        assert report.observations_per_output["GE"] == 5
        for ind in ("VA", "PV", "RQ", "RL", "CC"):
            assert report.observations_per_output[ind] == 6

    def test_culture_in_unit_interval_and_outputs_standardized(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        dataset, _ = load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))
        assert dataset.culture_scaled.min() >= 0.0
        assert dataset.culture_scaled.max() <= 1.0
        for j in range(6):
            col = dataset.outputs[:, j]
            col = col[~np.isnan(col)]
            assert abs(col.mean()) < 1e-10
            assert abs(col.std(ddof=1) - 1.0) < 1e-10

    def test_single_country_rejected(self, tmp_path):
        paths = write_panel_csvs(
            tmp_path,
            [("AAA", 40, 50, 60, 70, 30, 20)],
            [("AAA", 2000, "VA", 0.5), ("AAA", 2000, "GE", 0.1),
             ("AAA", 2001, "VA", 0.7), ("AAA", 2001, "GE", 0.4)],
            [("AAA", 2000, 1000), ("AAA", 2001, 1100)],
        )
        with pytest.raises(DataError, match="at least 2"):
            load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))

    def test_malformed_numeric_reports_row(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        gdp = paths[2]
        lines = gdp.read_text().splitlines()
        lines[2] = "BBB,2000,not-a-number"
        gdp.write_text("\n".join(lines) + "\n")
        with pytest.raises(DataError, match="row 3"):
            load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))

    def test_empty_country_intersection_rejected(self, tmp_path):
        paths = write_panel_csvs(
            tmp_path,
            [("AAA", 40, 50, 60, 70, 30, 20), ("BBB", 1, 2, 3, 4, 5, 6)],
            [("CCC", 2000, "VA", 0.5), ("DDD", 2000, "VA", 0.2)],
            [("EEE", 2000, 1000), ("FFF", 2000, 2000)],
        )
        with pytest.raises(DataError):
            load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))

    def test_incomplete_culture_dropped_and_reported(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        culture = paths[0]
        text = culture.read_text().replace("BBB,80,20,40,90,60,50", "BBB,80,,40,90,60,50")
        culture.write_text(text)
        dataset, report = load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))
        assert dataset.n_countries == 2
        assert report.dropped_countries["BBB"] == "incomplete culture dimensions"

    def test_duplicate_country_rejected(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        culture = paths[0]
        culture.write_text(culture.read_text() + "AAA,1,2,3,4,5,6\n")
        with pytest.raises(DataError, match="duplicate"):
            load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))

    def test_deterministic_canonical_bytes(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        cfg = IngestConfig(year_min=2000, year_max=2001)
        first, _ = load_panel(*paths, cfg)
        second, _ = load_panel(*paths, cfg)
        assert first.canonical_json().encode() == second.canonical_json().encode()

    def test_unknown_indicator_rejected(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        wgi = paths[1]
        wgi.write_text(wgi.read_text() + "AAA,2000,XX,0.5\n")
        with pytest.raises(DataError, match="unknown indicator"):
            load_panel(*paths, IngestConfig(year_min=2000, year_max=2001))

    def test_standardization_modes(self, tmp_path):
        paths = _three_country_fixture(tmp_path)
        raw, _ = load_panel(*paths, IngestConfig(2000, 2001, standardization="none"))
        per_year, _ = load_panel(*paths, IngestConfig(2000, 2001, standardization="per_year"))
        col = per_year.outputs[:, 0]
        for year in (2000, 2001):
            sel = (per_year.obs_year == year) & ~np.isnan(col)
            assert abs(col[sel].mean()) < 1e-10
        # "none" keeps the file values verbatim
        assert not np.allclose(raw.outputs[:, 0], per_year.outputs[:, 0])


def test_paper_shaped_sample_counts(tmp_path):
    # 94 countries over the 21 sample years with 13 country-year cells
    # removed entirely -> 1961 observations
    rng = np.random.default_rng(20)
    iso3s = [f"C{i:02d}" for i in range(94)]
    culture = [(iso3, *np.round(rng.uniform(1, 100, 6), 1)) for iso3 in iso3s]
    all_cells = [(iso3, year) for iso3 in iso3s for year in DEFAULT_YEARS]
    removed = {all_cells[k] for k in rng.choice(len(all_cells), size=13, replace=False)}
    wgi, gdp = [], []
    for iso3, year in all_cells:
        gdp.append((iso3, year, round(float(np.exp(rng.normal(8.5, 1.2))), 2)))
        if (iso3, year) in removed:
            continue
        for ind in INDICATORS:
            wgi.append((iso3, year, ind, round(float(rng.normal()), 4)))
    paths = write_panel_csvs(tmp_path, culture, wgi, gdp)
    dataset, report = load_panel(*paths)
    assert dataset.n_countries == 94
    assert dataset.n_years == 21
    assert dataset.n_observations == 1961
    assert report.dropped_cells["missing all outputs"] == 13
