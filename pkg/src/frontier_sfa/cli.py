"""Command-line surface: ingest, diagnose, fit, efficiency, simulate, replicate.

Configuration is a flat key-value file (``key = value`` per line, ``#``
comments) and every key can be overridden on the command line as
``--key value``. Unknown keys are rejected. Exit codes: 0 success,
1 data error, 2 estimation failure, 3 configuration error.

``FRONTIER_SFA_THREADS`` caps parallelism across the six output equations
(default 1, i.e. serial). All outputs are byte-identical across reruns
with the same inputs and seed.
"""

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import reference
from .efficiency import (indicator_ranking, mean_scores, rank_countries,
                         score_panel)
from .errors import (ConfigError, DataError, EstimationError, FrontierError,
                     InferenceError, ParameterError)
from .fitting import FitOptions, fit_mle
from .inference import model_selection, standard_errors
from .model import Distribution, FrontierParams, FrontierSpec, TimeModel
from .ols import OLS_PARAM_NAMES, fit_ols
from .panel import INDICATORS, IngestConfig, load_panel
from .synthetic import DEFAULT_YEARS, generate_panel

SPEC_CHOICES = ("auto", "ti-tn", "ti-hn", "td-tn")
_SPEC_MAP = {
    "ti-tn": (Distribution.TRUNCATED_NORMAL, TimeModel.TIME_INVARIANT),
    "ti-hn": (Distribution.HALF_NORMAL, TimeModel.TIME_INVARIANT),
    "td-tn": (Distribution.TRUNCATED_NORMAL, TimeModel.TIME_DECAY),
}

_GE = reference.TABLE_COEFFICIENTS["GE"]

# key -> (parser, default); the single flat namespace shared by the config
# file and --key overrides
CONFIG_SCHEMA = {
    "culture": (str, None),
    "wgi": (str, None),
    "gdp": (str, None),
    "out": (str, "out"),
    "seed": (int, 0),
    "starts": (int, 9),
    "spec": (str, "ti-tn"),
    "year_min": (int, 1996),
    "year_max": (int, 2019),
    "standardization": (str, "pooled"),
    "eta_threshold": (float, 0.01),
    "max_iterations": (int, 500),
    "gradient_tolerance": (float, 1e-5),
    "step_tolerance": (float, 1e-9),
    "n_countries": (int, 94),
    "output": (str, "GE"),
    "covariates": (str, "correlated"),
    "truth_constant": (float, _GE["constant"][0]),
    "truth_pdi": (float, _GE["pdi"][0]),
    "truth_idv": (float, _GE["idv"][0]),
    "truth_mas": (float, _GE["mas"][0]),
    "truth_uai": (float, _GE["uai"][0]),
    "truth_lto": (float, _GE["lto"][0]),
    "truth_ivr": (float, _GE["ivr"][0]),
    "truth_gdp_level": (float, _GE["gdp_level"][0]),
    "truth_sigma2": (float, _GE["sigma2"][0]),
    "truth_theta": (float, _GE["theta"][0]),
    "truth_mu": (float, _GE["mu"][0]),
    "truth_eta": (float, 0.0),
}


def _parse_config_file(path):
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected 'key = value'")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = raw
    return values


def _coerce(key, raw):
    if key not in CONFIG_SCHEMA:
        raise ConfigError(f"unknown configuration key {key!r}")
    parser, _ = CONFIG_SCHEMA[key]
    try:
        return parser(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"invalid value {raw!r} for key {key!r}") from None


def build_config(args, overrides):
    """Merge defaults, config file, named flags, and --key overrides."""
    cfg = {key: default for key, (_, default) in CONFIG_SCHEMA.items()}
    if args.config:
        for key, raw in _parse_config_file(args.config).items():
            cfg[key] = _coerce(key, raw)
    for key in ("out", "seed", "starts", "spec"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = _coerce(key, val)
    for key, raw in overrides.items():
        cfg[key] = _coerce(key, raw)

    if cfg["spec"] not in SPEC_CHOICES:
        raise ConfigError(f"spec must be one of {', '.join(SPEC_CHOICES)}")
    if cfg["standardization"] not in ("pooled", "per_year", "none"):
        raise ConfigError("standardization must be pooled, per_year or none")
    if cfg["output"] not in INDICATORS:
        raise ConfigError(f"output must be one of {', '.join(INDICATORS)}")
    if cfg["covariates"] not in ("uniform", "correlated", "resample"):
        raise ConfigError("covariates must be uniform, correlated or resample")
    if cfg["n_countries"] < 2:
        raise ConfigError("n_countries must be at least 2")
    if cfg["starts"] < 1:
        raise ConfigError("starts must be at least 1")
    return cfg


def _parse_overrides(tokens):
    overrides = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--"):
            raise ConfigError(f"unexpected argument {token!r}")
        if "=" in token:
            key, raw = token[2:].split("=", 1)
        else:
            key = token[2:]
            if i + 1 >= len(tokens):
                raise ConfigError(f"missing value for override {token!r}")
            raw = tokens[i + 1]
            i += 1
        key = key.replace("-", "_")
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"unknown configuration key {key!r}")
        overrides[key] = raw
        i += 1
    return overrides


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _fit_options(cfg) -> FitOptions:
    return FitOptions(
        max_iterations=cfg["max_iterations"],
        gradient_tolerance=cfg["gradient_tolerance"],
        step_tolerance=cfg["step_tolerance"],
        starts=cfg["starts"],
        seed=cfg["seed"],
    )


def _load(cfg):
    for key in ("culture", "wgi", "gdp"):
        if not cfg[key]:
            raise ConfigError(f"missing required path {key!r}")
    ingest = IngestConfig(year_min=cfg["year_min"], year_max=cfg["year_max"],
                          standardization=cfg["standardization"])
    return load_panel(cfg["culture"], cfg["wgi"], cfg["gdp"], ingest)


def _resolve_specs(cfg, dataset, options):
    """Per-output FrontierSpec, either fixed or via the selection ladder."""
    if cfg["spec"] != "auto":
        dist, tm = _SPEC_MAP[cfg["spec"]]
        return {j: FrontierSpec(j, dist, tm) for j in range(1, 7)}, None
    report = model_selection(dataset, options, eta_threshold=cfg["eta_threshold"])
    specs = {}
    for j, sel in enumerate(report.outputs, start=1):
        # no inefficiency evidence still gets the default spec, with the
        # verdict carried in the report
        specs[j] = sel.chosen or FrontierSpec(j)
    return specs, report


def _n_threads():
    raw = os.environ.get("FRONTIER_SFA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"FRONTIER_SFA_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def _map_outputs(fn, items):
    n = _n_threads()
    if n == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def _write_json(path, payload):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value):
    if value is None:
        return ""
    return repr(float(value))


def _spec_label(spec: FrontierSpec) -> str:
    tm = "ti" if spec.time_model is TimeModel.TIME_INVARIANT else "td"
    dist = "tn" if spec.distribution is Distribution.TRUNCATED_NORMAL else "hn"
    return f"{tm}-{dist}"


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(cfg):
    dataset, report = _load(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / "dataset_summary.json", {
        "n_countries": dataset.n_countries,
        "n_years": dataset.n_years,
        "n_observations": dataset.n_observations,
        "years": list(dataset.years),
        "observations_per_output": report.observations_per_output,
        "dropped_countries": report.dropped_countries,
        "dropped_cells": report.dropped_cells,
    })
    print(f"ingested {dataset.n_countries} countries, "
          f"{dataset.n_observations} observations over {dataset.n_years} years")
    return 0


def cmd_diagnose(cfg, run_selection=False):
    dataset, _ = _load(cfg)
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    diagnostics = {}
    for j, indicator in enumerate(INDICATORS, start=1):
        if dataset.equation(j).n_obs == 0:
            diagnostics[indicator] = {"status": "skipped: no observations"}
            continue
        ols = fit_ols(dataset, j)
        diagnostics[indicator] = {
            "r_squared": ols.r_squared,
            "skewness": ols.skewness,
            "inefficiency_evidence": bool(ols.skewness < 0),
        }
    _write_json(out / "diagnostics.json", diagnostics)
    if run_selection:
        report = model_selection(dataset, _fit_options(cfg),
                                 eta_threshold=cfg["eta_threshold"])
        _write_json(out / "selection_report.json", _selection_payload(report))
    for indicator, d in diagnostics.items():
        if "status" in d:
            print(f"{indicator}: {d['status']}")
            continue
        verdict = "inefficiency" if d["inefficiency_evidence"] else "no inefficiency evidence"
        print(f"{indicator}: R2={d['r_squared']:.3f} skewness={d['skewness']:.3f} ({verdict})")
    return 0


def _selection_payload(report):
    return {
        "eta_threshold": report.eta_threshold,
        "outputs": {
            sel.indicator: {
                "skewness": sel.skewness,
                "inefficiency_evidence": sel.inefficiency_evidence,
                "eta": sel.eta,
                "time_invariant": sel.time_invariant,
                "mu": sel.mu,
                "mu_se": sel.mu_se,
                "mu_p": sel.mu_p,
                "truncated_normal": sel.truncated_normal,
                "chosen": _spec_label(sel.chosen) if sel.chosen else None,
            }
            for sel in report.outputs
        },
    }


def _fit_one_output(dataset, spec, options):
    result = {"indicator": INDICATORS[spec.output_index - 1], "spec": _spec_label(spec)}
    if dataset.equation(spec.output_index).n_obs == 0:
        result.update(status="skipped", message="no observations")
        return result
    try:
        ols = fit_ols(dataset, spec.output_index)
        fit = fit_mle(dataset, spec, options)
        table = standard_errors(fit)
        result.update(status="ok", ols=ols, fit=fit, table=table)
    except (EstimationError, InferenceError) as exc:
        result.update(status="error", message=str(exc))
    return result


def cmd_fit(cfg):
    dataset, _ = _load(cfg)
    options = _fit_options(cfg)
    specs, _ = _resolve_specs(cfg, dataset, options)
    results = _map_outputs(
        lambda j: _fit_one_output(dataset, specs[j], options), range(1, 7)
    )
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    sfa_rows, ols_rows, meta = [], [], {}
    failed = False
    for res in results:
        indicator = res["indicator"]
        if res["status"] == "skipped":
            meta[indicator] = {"status": "skipped", "message": res["message"],
                               "spec": res["spec"]}
            print(f"{indicator}: skipped ({res['message']})")
            continue
        if res["status"] != "ok":
            failed = True
            meta[indicator] = {"status": "error", "message": res["message"],
                               "spec": res["spec"]}
            print(f"{indicator}: ERROR {res['message']}", file=sys.stderr)
            continue
        fit, table, ols = res["fit"], res["table"], res["ols"]
        for row in table.rows:
            sfa_rows.append([indicator, row.name, _fmt(row.estimate), _fmt(row.se),
                             _fmt(row.z), _fmt(row.p), row.stars])
        for name, est in zip(OLS_PARAM_NAMES, ols.beta_ols):
            ols_rows.append([indicator, name, _fmt(est), "", "", "", ""])
        meta[indicator] = {
            "status": "ok",
            "spec": res["spec"],
            "loglik": fit.loglik,
            "sigma2": fit.params.sigma2,
            "theta": fit.params.theta,
            "mu": fit.params.mu,
            "eta": fit.params.eta,
            "converged": fit.converged,
            "iterations": fit.iterations,
            "start_index": fit.start_index,
            "condition_flag": fit.condition_flag,
            "r_squared_ols": ols.r_squared,
            "skewness_ols": ols.skewness,
            "n_obs": fit.n_obs,
            "n_countries": fit.n_countries,
        }
        print(f"{indicator}: loglik={fit.loglik:.4f} theta={fit.params.theta:.3f} "
              f"mu={fit.params.mu:.3f}")

    header = ["output", "parameter", "estimate", "se", "z", "p", "stars"]
    _write_csv(out / "coefficients_sfa.csv", header, sfa_rows)
    _write_csv(out / "coefficients_ols.csv", header, ols_rows)
    _write_json(out / "fit_meta.json", meta)
    return 2 if failed else 0


def cmd_efficiency(cfg):
    dataset, _ = _load(cfg)
    options = _fit_options(cfg)
    specs, _ = _resolve_specs(cfg, dataset, options)

    def run(j):
        if dataset.equation(j).n_obs == 0:
            return []
        fit = fit_mle(dataset, specs[j], options)
        return score_panel(dataset, specs[j], fit)

    try:
        per_output = _map_outputs(run, range(1, 7))
    except (EstimationError, InferenceError) as exc:
        raise EstimationError(f"efficiency scoring failed: {exc}") from exc
    scores = [s for group in per_output for s in group]
    means = mean_scores(scores)
    ranked = rank_countries(means)

    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "efficiency.csv", ["iso3", "indicator", "jlms", "te"],
               [[s.iso3, INDICATORS[s.output_index - 1], _fmt(s.jlms), _fmt(s.te)]
                for s in scores])
    _write_csv(out / "efficiency_mean.csv", ["iso3", "mean_te", "n_indicators"],
               [[m.iso3, _fmt(m.mean_te), m.n_indicators] for m in ranked])

    def top_bottom(entries, value):
        return {
            "top": [{"iso3": e.iso3, "score": value(e)} for e in entries[:5]],
            "bottom": [{"iso3": e.iso3, "score": value(e)} for e in entries[::-1][:5]],
        }

    rankings = {"overall": top_bottom(ranked, lambda m: m.mean_te),
                "by_indicator": {}}
    for j, indicator in enumerate(INDICATORS, start=1):
        ordered = indicator_ranking(scores, j)
        rankings["by_indicator"][indicator] = top_bottom(ordered, lambda s: s.te)
    _write_json(out / "rankings.json", rankings)
    top = ", ".join(e.iso3 for e in ranked[:5])
    print(f"scored {len(means)} countries; top five: {top}")
    return 0


def _band_check(name, value, lo, hi, extra=None):
    status = "pass" if (value is not None and lo <= value <= hi) else "flag"
    check = {"check": name, "value": value, "band": [lo, hi], "status": status}
    if extra:
        check.update(extra)
    return check


def cmd_replicate(cfg):
    dataset, ingest_report = _load(cfg)
    options = _fit_options(cfg)
    report = model_selection(dataset, options, eta_threshold=cfg["eta_threshold"])
    specs = {j: FrontierSpec(j) for j in range(1, 7)}  # published table: ti-tn
    results = _map_outputs(
        lambda j: _fit_one_output(dataset, specs[j], options), range(1, 7)
    )
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    checks = []
    scores = []
    bands = reference.BANDS
    for res in results:
        indicator = res["indicator"]
        if res["status"] != "ok":
            checks.append({"check": f"fit[{indicator}]", "status": "flag",
                           "value": None, "message": res["message"]})
            continue
        fit, ols = res["fit"], res["ols"]
        checks.append(_band_check(f"skewness[{indicator}]", ols.skewness,
                                  -math.inf, 0.0))
        checks.append(_band_check(f"r_squared[{indicator}]", ols.r_squared,
                                  *bands["r_squared"]))
        checks.append(_band_check(f"theta[{indicator}]", fit.params.theta,
                                  *bands["theta"]))
        checks.append(_band_check(f"mu[{indicator}]", fit.params.mu, *bands["mu"]))
        # published sign pattern for the two universally significant inputs
        pdi = res["table"].row("pdi")
        lto = res["table"].row("lto")
        if pdi.stars:
            checks.append({"check": f"pdi_negative[{indicator}]",
                           "value": pdi.estimate,
                           "status": "pass" if pdi.estimate < 0 else "flag"})
        if lto.stars:
            checks.append({"check": f"lto_positive[{indicator}]",
                           "value": lto.estimate,
                           "status": "pass" if lto.estimate > 0 else "flag"})
        output_scores = score_panel(dataset, fit.spec, fit)
        scores.extend(output_scores)
        mean_te = float(np.mean([s.te for s in output_scores]))
        checks.append(_band_check(f"mean_te[{indicator}]", mean_te,
                                  *bands["mean_te"]))

    if scores:
        ranked = rank_countries(mean_scores(scores))
        top5 = {m.iso3 for m in ranked[:5]}
        bottom5 = {m.iso3 for m in ranked[::-1][:5]}
        overlap_top = len(top5 & set(reference.TOP5))
        overlap_bottom = len(bottom5 & set(reference.BOTTOM5))
        checks.append({"check": "top5_overlap", "value": overlap_top,
                       "expected_at_least": bands["ranking_overlap"],
                       "observed": sorted(top5),
                       "status": "pass" if overlap_top >= bands["ranking_overlap"] else "flag"})
        checks.append({"check": "bottom5_overlap", "value": overlap_bottom,
                       "expected_at_least": bands["ranking_overlap"],
                       "observed": sorted(bottom5),
                       "status": "pass" if overlap_bottom >= bands["ranking_overlap"] else "flag"})

    n_pass = sum(1 for c in checks if c["status"] == "pass")
    payload = {
        "sample": {
            "n_countries": dataset.n_countries,
            "n_years": dataset.n_years,
            "n_observations": dataset.n_observations,
            "reference": reference.SAMPLE,
        },
        "selection": _selection_payload(report),
        "checks": checks,
        "summary": {"pass": n_pass, "flag": len(checks) - n_pass},
    }
    _write_json(out / "replication_report.json", payload)
    print(f"replication: {n_pass}/{len(checks)} checks pass "
          f"(flags indicate data-vintage drift, not failure)")
    return 0


def _truth_from_config(cfg) -> FrontierParams:
    return FrontierParams(
        alpha=cfg["truth_constant"],
        beta=np.array([cfg["truth_pdi"], cfg["truth_idv"], cfg["truth_mas"],
                       cfg["truth_uai"], cfg["truth_lto"], cfg["truth_ivr"]]),
        gamma=np.array([cfg["truth_gdp_level"]]),
        sigma2=cfg["truth_sigma2"],
        theta=cfg["truth_theta"],
        mu=cfg["truth_mu"],
        eta=cfg["truth_eta"],
    )


def cmd_simulate(cfg):
    spec_key = cfg["spec"] if cfg["spec"] != "auto" else "ti-tn"
    dist, tm = _SPEC_MAP[spec_key]
    output_index = INDICATORS.index(cfg["output"]) + 1
    spec = FrontierSpec(output_index, dist, tm)
    truth = _truth_from_config(cfg)
    if dist is Distribution.HALF_NORMAL and truth.mu != 0.0:
        raise ConfigError("half-normal simulation requires truth_mu = 0")
    if tm is TimeModel.TIME_INVARIANT and truth.eta != 0.0:
        raise ConfigError("time-invariant simulation requires truth_eta = 0")
    try:
        truth.validate(spec)
    except ParameterError as exc:
        raise ConfigError(f"invalid truth parameters: {exc}") from exc

    years = [y for y in DEFAULT_YEARS if cfg["year_min"] <= y <= cfg["year_max"]]
    if not years:
        raise ConfigError("year range excludes all sample years")
    if cfg["covariates"] == "resample":
        source_dataset, _ = _load(cfg)
        covariates = source_dataset
    else:
        covariates = cfg["covariates"]

    panel = generate_panel(truth, spec, cfg["n_countries"], years=years,
                           covariate_source=covariates, seed=cfg["seed"])
    ds = panel.dataset
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)

    _write_csv(out / "culture.csv", ("iso3",) + tuple(d for d in ("pdi", "idv", "mas", "uai", "lto", "ivr")),
               [[c.iso3] + [_fmt(v) for v in c.culture_raw] for c in ds.countries])
    indicator = cfg["output"]
    j = output_index - 1
    _write_csv(out / "wgi.csv", ["iso3", "year", "indicator", "value"],
               [[o.iso3, o.year, indicator, _fmt(o.outputs[j])] for o in ds.observations])
    _write_csv(out / "gdp.csv", ["iso3", "year", "gdp_pc_usd"],
               [[o.iso3, o.year, _fmt(o.gdp_pc)] for o in ds.observations])
    _write_csv(out / "latents.csv", ["iso3", "year", "u", "v"],
               [[o.iso3, o.year, _fmt(panel.latent_u[ds.obs_country[k]]),
                 _fmt(panel.latent_v[k])] for k, o in enumerate(ds.observations)])

    y = ds.outputs[:, j]
    m, s = float(np.mean(y)), float(np.std(y, ddof=1))
    truth_payload = {
        "spec": _spec_label(spec),
        "indicator": indicator,
        "seed": cfg["seed"],
        "n_countries": ds.n_countries,
        "years": list(ds.years),
        "model_units": _params_payload(truth),
        # what ingestion's pooled z-scoring turns the truth into
        "standardized_equivalent": _params_payload(FrontierParams(
            alpha=(truth.alpha - m) / s, beta=truth.beta / s,
            gamma=truth.gamma / s, sigma2=truth.sigma2 / s**2,
            theta=truth.theta, mu=truth.mu / s, eta=truth.eta,
        ), mean=m, sd=s),
    }
    _write_json(out / "truth.json", truth_payload)
    print(f"simulated {ds.n_countries} countries x {ds.n_years} years "
          f"-> {out} (indicator {indicator})")
    return 0


def _params_payload(params: FrontierParams, **extra):
    payload = {
        "constant": params.alpha,
        "pdi": params.beta[0], "idv": params.beta[1], "mas": params.beta[2],
        "uai": params.beta[3], "lto": params.beta[4], "ivr": params.beta[5],
        "gdp_level": params.gamma[0],
        "sigma2": params.sigma2, "theta": params.theta,
        "mu": params.mu, "eta": params.eta,
    }
    payload.update(extra)
    return payload


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser():
    parser = argparse.ArgumentParser(
        prog="frontier-sfa",
        description="Panel stochastic-frontier estimation and efficiency scoring",
        epilog="Any configuration key can be overridden as --key value; "
               "see the README for the full key list.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("ingest", "load the three CSV files and write dataset_summary.json"),
        ("diagnose", "OLS diagnostics per output (R2, residual skewness)"),
        ("fit", "fit the frontier model per output; write coefficient tables"),
        ("efficiency", "fit and score per-country technical efficiency"),
        ("simulate", "generate a synthetic panel at known truth"),
        ("replicate", "run the full ladder and compare against the published values"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key-value configuration file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", help="random seed")
        p.add_argument("--starts", help="multi-start count")
        p.add_argument("--spec", help="model specification: " + "|".join(SPEC_CHOICES))
        if name == "diagnose":
            p.add_argument("--selection", action="store_true",
                           help="also run the three-step selection ladder")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args, leftover = parser.parse_known_args(argv)
    try:
        overrides = _parse_overrides(leftover)
        cfg = build_config(args, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    try:
        if args.command == "ingest":
            return cmd_ingest(cfg)
        if args.command == "diagnose":
            return cmd_diagnose(cfg, run_selection=args.selection)
        if args.command == "fit":
            return cmd_fit(cfg)
        if args.command == "efficiency":
            return cmd_efficiency(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "replicate":
            return cmd_replicate(cfg)
        raise ConfigError(f"unknown command {args.command}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 1
    except (EstimationError, ParameterError) as exc:
        print(f"estimation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
