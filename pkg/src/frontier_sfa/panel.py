"""Panel data model: CSV ingestion and variable transforms.

Three input files define the sample (UTF-8, comma-separated, ``.`` decimal
point, no thousands separators):

    culture.csv  header ``iso3,pdi,idv,mas,uai,lto,ivr``; one row per country
    wgi.csv      header ``iso3,year,indicator,value`` (long format);
                 indicator in {VA,PV,GE,RQ,RL,CC}; missing cells absent
    gdp.csv      header ``iso3,year,gdp_pc_usd``; positive decimals

Transforms applied on load:

    inputs    per-dimension min-max scaling of the culture scores onto [0, 1]
              over the included sample (sample min -> 0, sample max -> 1)
    outputs   pooled z-scoring per indicator (sample sd, n-1 denominator);
              per-year z-scoring or no re-scaling available via IngestConfig
    control   GDP level: log GDP per capita minus the log of the arithmetic
              mean GDP per capita across sample countries present that year

Countries are ordered by ISO3 and observations by (ISO3, year) so that
identical inputs always produce an identical dataset.
"""

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

INDICATORS = ("VA", "PV", "GE", "RQ", "RL", "CC")
CULTURE_DIMS = ("pdi", "idv", "mas", "uai", "lto", "ivr")

N_OUTPUTS = len(INDICATORS)
N_INPUTS = len(CULTURE_DIMS)
N_CONTROLS = 1


@dataclass(frozen=True)
class CountryRecord:
    """A country with its six raw (unscaled) culture dimension scores."""

    iso3: str
    culture_raw: np.ndarray  # (6,) PDI, IDV, MAS, UAI, LTO, IVR


@dataclass(frozen=True)
class PanelObservation:
    """One country-year after transforms.

    ``outputs`` holds the six standardized governance values with NaN for
    missing cells; ``gdp_pc`` is the raw (untransformed) GDP per capita.
    """

    iso3: str
    year: int
    outputs: np.ndarray  # (6,) standardized, NaN = missing
    gdp_pc: float


@dataclass(frozen=True)
class IngestConfig:
    year_min: int = 1996
    year_max: int = 2019
    standardization: str = "pooled"  # pooled | per_year | none
    min_countries: int = 2

    def __post_init__(self):
        if self.standardization not in ("pooled", "per_year", "none"):
            raise DataError(
                f"unknown standardization mode {self.standardization!r}"
            )
        if self.year_min > self.year_max:
            raise DataError("year_min exceeds year_max")


@dataclass(frozen=True)
class IngestReport:
    """What was kept and what was dropped during ingestion."""

    n_countries: int
    n_observations: int
    observations_per_output: dict
    dropped_countries: dict  # iso3 -> reason
    dropped_cells: dict  # reason -> count


@dataclass(frozen=True)
class EquationData:
    """Estimation arrays for one output equation (non-missing rows only).

    Rows are stacked country-major; ``offsets[i]:offsets[i+1]`` slices the
    rows of country ``iso3s[i]``.
    """

    output_index: int  # 1-based
    iso3s: tuple
    offsets: np.ndarray  # (n_countries + 1,) int64
    years: np.ndarray  # (n_obs,)
    y: np.ndarray  # (n_obs,)
    x: np.ndarray  # (n_obs, 6) scaled culture
    z: np.ndarray  # (n_obs,) GDP level

    @property
    def n_obs(self):
        return self.y.size

    @property
    def n_countries(self):
        return len(self.iso3s)


@dataclass(frozen=True, eq=False)
class PanelDataset:
    """Immutable transformed panel, safe to share across concurrent fits."""

    countries: tuple  # CountryRecord, sorted by iso3
    observations: tuple  # PanelObservation, sorted by (iso3, year)
    iso3s: tuple
    years: tuple  # distinct years, ascending
    culture_scaled: np.ndarray  # (N, 6) in [0, 1]
    obs_country: np.ndarray  # (n_obs,) index into iso3s
    obs_year: np.ndarray  # (n_obs,) calendar year
    outputs: np.ndarray  # (n_obs, 6) transformed, NaN = missing
    gdp_level: np.ndarray  # (n_obs,)
    _equations: dict = field(repr=False, default_factory=dict)

    @property
    def n_countries(self):
        return len(self.iso3s)

    @property
    def n_years(self):
        return len(self.years)

    @property
    def n_observations(self):
        return self.obs_country.size

    @property
    def year_max(self):
        return max(self.years)

    def equation(self, output_index: int) -> EquationData:
        """Estimation arrays for one output (1-based index)."""
        if not 1 <= output_index <= N_OUTPUTS:
            raise DataError(f"output_index must be 1..{N_OUTPUTS}, got {output_index}")
        return self._equations[output_index]

    def canonical_json(self) -> str:
        """Deterministic full-precision serialization of the dataset."""
        payload = {
            "iso3s": list(self.iso3s),
            "years": list(self.years),
            "culture_scaled": [[float(v) for v in row] for row in self.culture_scaled],
            "observations": [
                {
                    "iso3": o.iso3,
                    "year": o.year,
                    "outputs": [None if math.isnan(v) else float(v) for v in o.outputs],
                    "gdp_pc": float(o.gdp_pc),
                    "gdp_level": float(self.gdp_level[k]),
                }
                for k, o in enumerate(self.observations)
            ],
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_arrays(cls, iso3s, culture_raw, culture_scaled, obs_country, obs_year,
                    outputs, gdp_pc, gdp_level):
        """Assemble a dataset from prepared arrays (canonical order assumed)."""
        iso3s = tuple(iso3s)
        countries = tuple(
            CountryRecord(iso3, np.asarray(culture_raw[i], dtype=float))
            for i, iso3 in enumerate(iso3s)
        )
        observations = tuple(
            PanelObservation(
                iso3s[obs_country[k]],
                int(obs_year[k]),
                np.asarray(outputs[k], dtype=float),
                float(gdp_pc[k]),
            )
            for k in range(len(obs_country))
        )
        ds = cls(
            countries=countries,
            observations=observations,
            iso3s=iso3s,
            years=tuple(sorted(set(int(y) for y in obs_year))),
            culture_scaled=np.asarray(culture_scaled, dtype=float),
            obs_country=np.asarray(obs_country, dtype=np.int64),
            obs_year=np.asarray(obs_year, dtype=np.int64),
            outputs=np.asarray(outputs, dtype=float),
            gdp_level=np.asarray(gdp_level, dtype=float),
        )
        for j in range(1, N_OUTPUTS + 1):
            ds._equations[j] = _extract_equation(ds, j)
        return ds


def _extract_equation(ds: PanelDataset, output_index: int) -> EquationData:
    j = output_index - 1
    mask = ~np.isnan(ds.outputs[:, j])
    country = ds.obs_country[mask]
    # observations are country-major already; find per-country row counts
    present = np.unique(country)
    counts = np.bincount(country, minlength=ds.n_countries)[present]
    offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
    x = ds.culture_scaled[country]
    return EquationData(
        output_index=output_index,
        iso3s=tuple(ds.iso3s[i] for i in present),
        offsets=offsets,
        years=ds.obs_year[mask],
        y=ds.outputs[mask, j],
        x=x,
        z=ds.gdp_level[mask],
    )


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

def scale_culture(raw: np.ndarray) -> np.ndarray:
    """Min-max map of one dimension's raw scores onto [0, 1].

    The sample minimum maps to 0 and the sample maximum to 1, which keeps
    publisher scores above 100 inside the unit interval.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.size < 2:
        raise DataError("culture scaling needs at least 2 countries")
    if not np.all(np.isfinite(raw)):
        raise DataError("culture scores must be finite")
    lo, hi = raw.min(), raw.max()
    if hi == lo:
        raise DataError("culture dimension is constant; scaling undefined")
    return (raw - lo) / (hi - lo)


def standardize_outputs(values: np.ndarray) -> np.ndarray:
    """Z-score a pooled indicator sample (n-1 denominator); NaNs pass through."""
    values = np.asarray(values, dtype=float)
    obs = values[~np.isnan(values)]
    if obs.size < 2:
        raise DataError("standardization needs at least 2 non-missing values")
    sd = obs.std(ddof=1)
    if sd == 0.0:
        raise DataError("zero variance; standardization undefined")
    return (values - obs.mean()) / sd


def gdp_level(gdp_pc: np.ndarray, year: np.ndarray) -> np.ndarray:
    """log GDP per capita minus log of the yearly cross-country mean.

    The mean is the arithmetic mean of GDP per capita over the sample
    countries present in that year (not a mean of logs).
    """
    gdp_pc = np.asarray(gdp_pc, dtype=float)
    year = np.asarray(year)
    if np.any(~np.isfinite(gdp_pc)) or np.any(gdp_pc <= 0):
        raise DataError("GDP per capita must be positive and finite")
    out = np.empty_like(gdp_pc)
    for y in np.unique(year):
        sel = year == y
        out[sel] = np.log(gdp_pc[sel]) - math.log(gdp_pc[sel].mean())
    return out


# ---------------------------------------------------------------------------
# ingestion
# ---------------------------------------------------------------------------

def _read_csv(path, expected_header):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != list(expected_header):
            raise DataError(
                f"{path}: expected header {','.join(expected_header)!r}, "
                f"got {','.join(header)!r}"
            )
        return [row for row in reader if row and any(cell.strip() for cell in row)]


def _parse_float(cell, path, row_no, column):
    cell = cell.strip()
    if cell == "":
        return math.nan
    try:
        return float(cell)
    except ValueError:
        raise DataError(
            f"{path}: row {row_no}: non-numeric {column} value {cell!r}"
        ) from None


def _parse_int(cell, path, row_no, column):
    try:
        return int(cell.strip())
    except ValueError:
        raise DataError(
            f"{path}: row {row_no}: non-integer {column} value {cell!r}"
        ) from None


def load_panel(culture_path, wgi_path, gdp_path, config: IngestConfig = IngestConfig()):
    """Ingest the three CSV files and apply all transforms.

    Returns ``(dataset, report)``. Countries lacking any of the six culture
    dimensions, GDP data, or governance data inside the configured year
    range are dropped and listed in the report.
    """
    culture_rows = _read_csv(culture_path, ("iso3",) + CULTURE_DIMS)
    wgi_rows = _read_csv(wgi_path, ("iso3", "year", "indicator", "value"))
    gdp_rows = _read_csv(gdp_path, ("iso3", "year", "gdp_pc_usd"))

    culture = {}
    incomplete = set()
    for row_no, row in enumerate(culture_rows, start=2):
        if len(row) != 1 + N_INPUTS:
            raise DataError(f"{culture_path}: row {row_no}: expected 7 fields")
        iso3 = row[0].strip()
        if iso3 in culture or iso3 in incomplete:
            raise DataError(f"{culture_path}: row {row_no}: duplicate country {iso3}")
        vals = np.array(
            [_parse_float(row[1 + k], culture_path, row_no, CULTURE_DIMS[k])
             for k in range(N_INPUTS)]
        )
        if np.all(np.isfinite(vals)):
            culture[iso3] = vals
        else:
            incomplete.add(iso3)

    wgi = {}
    for row_no, row in enumerate(wgi_rows, start=2):
        if len(row) != 4:
            raise DataError(f"{wgi_path}: row {row_no}: expected 4 fields")
        iso3 = row[0].strip()
        year = _parse_int(row[1], wgi_path, row_no, "year")
        indicator = row[2].strip()
        if indicator not in INDICATORS:
            raise DataError(
                f"{wgi_path}: row {row_no}: unknown indicator {indicator!r}"
            )
        value = _parse_float(row[3], wgi_path, row_no, "value")
        if math.isnan(value):
            raise DataError(f"{wgi_path}: row {row_no}: empty value cell")
        key = (iso3, year, indicator)
        if key in wgi:
            raise DataError(f"{wgi_path}: row {row_no}: duplicate cell {key}")
        wgi[key] = value

    gdp = {}
    for row_no, row in enumerate(gdp_rows, start=2):
        if len(row) != 3:
            raise DataError(f"{gdp_path}: row {row_no}: expected 3 fields")
        iso3 = row[0].strip()
        year = _parse_int(row[1], gdp_path, row_no, "year")
        value = _parse_float(row[2], gdp_path, row_no, "gdp_pc_usd")
        if math.isnan(value):
            raise DataError(f"{gdp_path}: row {row_no}: empty gdp_pc_usd cell")
        if value <= 0:
            raise DataError(
                f"{gdp_path}: row {row_no}: non-positive GDP per capita {value}"
            )
        if (iso3, year) in gdp:
            raise DataError(f"{gdp_path}: row {row_no}: duplicate cell {(iso3, year)}")
        gdp[(iso3, year)] = value

    in_range = lambda y: config.year_min <= y <= config.year_max
    wgi_cells = {}  # iso3 -> year -> {indicator: value}
    for (iso3, year, indicator), value in wgi.items():
        if in_range(year):
            wgi_cells.setdefault(iso3, {}).setdefault(year, {})[indicator] = value
    gdp_cells = {}  # iso3 -> {year: gdp_pc}
    for (iso3, year), value in gdp.items():
        if in_range(year):
            gdp_cells.setdefault(iso3, {})[year] = value
    wgi_countries = set(wgi_cells)
    gdp_countries = set(gdp_cells)

    dropped = {iso3: "incomplete culture dimensions" for iso3 in sorted(incomplete)}
    all_seen = set(culture) | incomplete | wgi_countries | gdp_countries
    kept = []
    for iso3 in sorted(all_seen):
        if iso3 in incomplete:
            continue
        if iso3 not in culture:
            dropped[iso3] = "no culture data"
        elif iso3 not in gdp_countries:
            dropped[iso3] = "no GDP data in year range"
        elif iso3 not in wgi_countries:
            dropped[iso3] = "no governance data in year range"
        else:
            kept.append(iso3)

    if not kept:
        raise DataError("no country appears in all three files")

    # observation = (country, year) with GDP and at least one output present
    dropped_cells = {"missing gdp": 0, "missing all outputs": 0}
    obs = []
    for iso3 in kept:
        years_here = sorted(set(wgi_cells[iso3]) | set(gdp_cells[iso3]))
        kept_any = False
        for year in years_here:
            if year not in gdp_cells[iso3]:
                dropped_cells["missing gdp"] += 1
                continue
            cells = wgi_cells[iso3].get(year, {})
            if not cells:
                dropped_cells["missing all outputs"] += 1
                continue
            row = np.array([cells.get(ind, math.nan) for ind in INDICATORS])
            obs.append((iso3, year, row, gdp_cells[iso3][year]))
            kept_any = True
        if not kept_any:
            dropped[iso3] = "no usable country-year"

    kept_final = [iso3 for iso3 in kept if iso3 not in dropped]
    if len(kept_final) < config.min_countries:
        raise DataError(
            f"panel needs at least {config.min_countries} countries, "
            f"got {len(kept_final)}"
        )
    index_of = {iso3: k for k, iso3 in enumerate(kept_final)}
    obs = [(index_of[c], y, row, g) for (c, y, row, g) in obs if c in index_of]
    obs.sort(key=lambda r: (r[0], r[1]))

    culture_raw = np.array([culture[iso3] for iso3 in kept_final])
    culture_scaled = np.column_stack(
        [scale_culture(culture_raw[:, k]) for k in range(N_INPUTS)]
    )

    obs_country = np.array([r[0] for r in obs], dtype=np.int64)
    obs_year = np.array([r[1] for r in obs], dtype=np.int64)
    outputs_raw = np.array([r[2] for r in obs])
    gdp_pc = np.array([r[3] for r in obs])

    outputs = np.empty_like(outputs_raw)
    for j in range(N_OUTPUTS):
        col = outputs_raw[:, j]
        if np.sum(~np.isnan(col)) < 2:
            outputs[:, j] = col  # (nearly) empty indicator stays as-is
        elif config.standardization == "pooled":
            outputs[:, j] = standardize_outputs(col)
        elif config.standardization == "per_year":
            outputs[:, j] = col
            for y in np.unique(obs_year):
                sel = (obs_year == y) & ~np.isnan(col)
                if sel.sum() >= 2:
                    outputs[sel, j] = standardize_outputs(col[sel])
        else:
            outputs[:, j] = col

    levels = gdp_level(gdp_pc, obs_year)

    dataset = PanelDataset.from_arrays(
        kept_final, culture_raw, culture_scaled, obs_country, obs_year,
        outputs, gdp_pc, levels,
    )
    report = IngestReport(
        n_countries=dataset.n_countries,
        n_observations=dataset.n_observations,
        observations_per_output={
            ind: int(np.sum(~np.isnan(outputs[:, j])))
            for j, ind in enumerate(INDICATORS)
        },
        dropped_countries=dropped,
        dropped_cells=dropped_cells,
    )
    return dataset, report
