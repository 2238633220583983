import json
from pathlib import Path

import numpy as np
import pytest

from frontier_sfa.cli import main

from .conftest import write_panel_csvs


def _read(path):
    return Path(path).read_bytes()


def _simulate(tmp_path, name, seed=11, n=40, extra=()):
    out = tmp_path / name
    code = main(["simulate", "--out", str(out), "--seed", str(seed),
                 "--n_countries", str(n), *extra])
    assert code == 0
    return out


def _data_flags(sim_dir):
    return ["--culture", str(sim_dir / "culture.csv"),
            "--wgi", str(sim_dir / "wgi.csv"),
            "--gdp", str(sim_dir / "gdp.csv")]


class TestSimulate:
    def test_writes_all_files(self, tmp_path):
        out = _simulate(tmp_path, "sim")
        for name in ("culture.csv", "wgi.csv", "gdp.csv", "truth.json", "latents.csv"):
            assert (out / name).exists()
        truth = json.loads((out / "truth.json").read_text())
        assert truth["indicator"] == "GE"
        assert truth["model_units"]["theta"] == 0.862

    def test_seed_repetition_is_byte_identical(self, tmp_path):
        a = _simulate(tmp_path, "a", seed=5)
        b = _simulate(tmp_path, "b", seed=5)
        for name in ("culture.csv", "wgi.csv", "gdp.csv", "truth.json", "latents.csv"):
            assert _read(a / name) == _read(b / name), name

    def test_round_trip_dimensions(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=7, n=23)
        out = tmp_path / "ing"
        assert main(["ingest", "--out", str(out), *_data_flags(sim)]) == 0
        summary = json.loads((out / "dataset_summary.json").read_text())
        truth = json.loads((sim / "truth.json").read_text())
        assert summary["n_countries"] == truth["n_countries"] == 23
        assert summary["years"] == truth["years"]
        assert summary["observations_per_output"]["GE"] == summary["n_observations"]

    def test_invalid_truth_rejected(self, tmp_path):
        code = main(["simulate", "--out", str(tmp_path / "x"),
                     "--truth_theta", "1.5"])
        assert code == 3


class TestConfig:
    def test_unknown_cli_key_is_config_error(self, tmp_path):
        assert main(["ingest", "--no-such-key", "1"]) == 3

    def test_unknown_file_key_is_config_error(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nonsense = 1\n")
        assert main(["ingest", "--config", str(cfg)]) == 3

    def test_bad_value_is_config_error(self, tmp_path):
        assert main(["ingest", "--seed", "pi"]) == 3
        assert main(["fit", "--spec", "bogus"]) == 3

    def test_missing_paths_are_config_error(self):
        assert main(["ingest"]) == 3

    def test_file_flag_and_override_precedence(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=3, n=12)
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            f"culture = {sim / 'culture.csv'}\n"
            f"wgi = {sim / 'wgi.csv'}\n"
            f"gdp = {sim / 'gdp.csv'}\n"
            "out = from-file\n"
            "# a comment line\n"
            "seed = 1\n"
        )
        out = tmp_path / "cli-wins"
        code = main(["ingest", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert out.exists() and not (tmp_path / "from-file").exists()

    def test_equals_form_override(self, tmp_path):
        out = tmp_path / "eq"
        code = main(["simulate", f"--out={out}", "--seed=2", "--n_countries=12",
                     "--truth_mu=-0.1"])
        assert code == 0
        truth = json.loads((out / "truth.json").read_text())
        assert truth["model_units"]["mu"] == -0.1


class TestIngest:
    def test_empty_files_exit_nonzero(self, tmp_path):
        paths = write_panel_csvs(tmp_path, [], [], [])
        code = main(["ingest", "--out", str(tmp_path / "o"),
                     "--culture", str(paths[0]), "--wgi", str(paths[1]),
                     "--gdp", str(paths[2])])
        assert code == 1

    def test_missing_file_exits_one(self, tmp_path):
        code = main(["ingest", "--out", str(tmp_path / "o"),
                     "--culture", str(tmp_path / "nope.csv"),
                     "--wgi", str(tmp_path / "nope.csv"),
                     "--gdp", str(tmp_path / "nope.csv")])
        assert code == 1


class TestFit:
    def test_fit_writes_tables_and_meta(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=11, n=60)
        out = tmp_path / "fit"
        code = main(["fit", "--out", str(out), "--seed", "0", "--starts", "3",
                     *_data_flags(sim)])
        assert code == 0
        meta = json.loads((out / "fit_meta.json").read_text())
        assert meta["GE"]["status"] == "ok"
        assert meta["GE"]["converged"] is True
        assert meta["VA"]["status"] == "skipped"
        rows = (out / "coefficients_sfa.csv").read_text().splitlines()
        assert rows[0] == "output,parameter,estimate,se,z,p,stars"
        names = [r.split(",")[1] for r in rows[1:] if r.startswith("GE,")]
        assert names == ["constant", "pdi", "idv", "mas", "uai", "lto", "ivr",
                         "gdp_level", "sigma2", "theta", "mu"]
        ols_rows = (out / "coefficients_ols.csv").read_text().splitlines()
        assert len([r for r in ols_rows[1:] if r.startswith("GE,")]) == 8

    def test_half_normal_spec_omits_mu(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=11, n=60)
        out = tmp_path / "fit-hn"
        code = main(["fit", "--out", str(out), "--seed", "0", "--starts", "2",
                     "--spec", "ti-hn", *_data_flags(sim)])
        assert code == 0
        rows = (out / "coefficients_sfa.csv").read_text().splitlines()
        names = [r.split(",")[1] for r in rows[1:] if r.startswith("GE,")]
        assert "mu" not in names

    def test_estimation_failure_exits_two_with_partial_results(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=11, n=30)
        # constant output column: estimation is impossible for GE
        wgi = sim / "wgi.csv"
        lines = wgi.read_text().splitlines()
        fixed = [lines[0]] + [",".join(l.split(",")[:3] + ["1.0"]) for l in lines[1:]]
        wgi.write_text("\n".join(fixed) + "\n")
        out = tmp_path / "fit-bad"
        code = main(["fit", "--out", str(out), "--standardization", "none",
                     *_data_flags(sim)])
        assert code == 2
        meta = json.loads((out / "fit_meta.json").read_text())
        assert meta["GE"]["status"] == "error"


class TestEfficiency:
    def test_scores_and_rankings(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=11, n=60)
        out = tmp_path / "eff"
        code = main(["efficiency", "--out", str(out), "--seed", "0",
                     "--starts", "3", *_data_flags(sim)])
        assert code == 0
        lines = (out / "efficiency.csv").read_text().splitlines()
        assert lines[0] == "iso3,indicator,jlms,te"
        assert len(lines) == 61
        te = np.array([float(l.split(",")[3]) for l in lines[1:]])
        assert np.all((te > 0) & (te < 1))
        means = (out / "efficiency_mean.csv").read_text().splitlines()
        assert means[0] == "iso3,mean_te,n_indicators"
        rankings = json.loads((out / "rankings.json").read_text())
        assert len(rankings["overall"]["top"]) == 5
        assert len(rankings["by_indicator"]["GE"]["bottom"]) == 5


class TestReplicate:
    def test_report_written_with_checks(self, tmp_path):
        sim = _simulate(tmp_path, "sim", seed=11, n=60)
        out = tmp_path / "rep"
        code = main(["replicate", "--out", str(out), "--seed", "0",
                     "--starts", "3", *_data_flags(sim)])
        assert code == 0
        report = json.loads((out / "replication_report.json").read_text())
        names = {c["check"] for c in report["checks"]}
        assert "theta[GE]" in names and "r_squared[GE]" in names
        assert report["summary"]["pass"] + report["summary"]["flag"] == len(report["checks"])
        assert "GE" in report["selection"]["outputs"]


def test_fit_byte_determinism(tmp_path):
    sim = _simulate(tmp_path, "sim", seed=11, n=40)
    outs = []
    for name in ("f1", "f2"):
        out = tmp_path / name
        code = main(["fit", "--out", str(out), "--seed", "4", "--starts", "2",
                     *_data_flags(sim)])
        assert code == 0
        outs.append(out)
    for name in ("coefficients_sfa.csv", "coefficients_ols.csv", "fit_meta.json"):
        assert _read(outs[0] / name) == _read(outs[1] / name), name
