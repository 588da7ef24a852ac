"""Pipeline orchestration and the command-line surface."""

import json
from datetime import date, timedelta

import numpy as np
import pytest

from cropcast.cli import main
from cropcast.ingest import write_series_csv
from cropcast.pipeline import (
    OUTPUT_DIR_ENV,
    PipelineConfig,
    run_pipeline,
)
from cropcast.synthetic import make_weekly_series

from conftest import make_series


def small_series(seed=0, n=60, crop="Alpha"):
    return make_weekly_series(
        crop, n_weeks=n, base=20.0, trend_per_week=0.05,
        seasonal_amplitude=2.0, period=4, noise_sd=0.3, seed=seed,
    )


def small_config(tmp_path, crops=("Alpha",), **extra):
    data_dir = tmp_path / "data"
    data_dir.mkdir(exist_ok=True)
    for i, crop in enumerate(crops):
        write_series_csv(small_series(seed=i, crop=crop), data_dir / f"{crop.lower()}.csv")
    doc = {
        "data_dir": str(data_dir),
        "output_dir": str(tmp_path / "out"),
        "crops": list(crops),
        "test_fraction": 0.2,
        "cv_folds": 3,
        "seasonal_period": 4,
        "horizon_weeks": 6,
        "moving_average_window": 3,
        "arima_grid": {"p": [0, 1], "d": [1], "q": [0]},
        "sarimax_grid": {"p": [0, 1], "d": [1], "q": [0], "P": [0, 1], "D": [0], "Q": [0]},
    }
    doc.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path, doc


ARTIFACT_KINDS = ("stationarity", "leaderboard", "cv", "champion", "forecast", "plotdata")


class TestRunPipeline:
    def test_single_crop_produces_six_artifacts(self, tmp_path):
        config_path, doc = small_config(tmp_path)
        result = run_pipeline(PipelineConfig.load(config_path))
        assert result.ok
        names = sorted(p.name for p in result.artifacts)
        expected = sorted(
            f"{kind}_alpha.{'json' if kind in ('stationarity', 'champion') else 'csv'}"
            for kind in ARTIFACT_KINDS
        )
        assert names == expected

    def test_raw_ingestion_adds_series_artifact(self, tmp_path):
        data_dir = tmp_path / "data"
        data_dir.mkdir()
        start = date(2015, 1, 5)
        lines = ["Centre,Week Date,Retail Price"]
        values = small_series(seed=3).values[:60]
        for i, v in enumerate(values):
            d = (start + timedelta(weeks=i)).strftime("%d-%m-%Y")
            lines.append(f"R1,{d},{v:.3f}")
        (data_dir / "beta_raw.csv").write_text("\n".join(lines) + "\n")
        config_path, doc = small_config(tmp_path, crops=("Beta",))
        (data_dir / "beta.csv").unlink()  # force the raw path
        doc["column_map"] = {"Centre": "region", "Week Date": "date", "Retail Price": "price"}
        doc["year_range"] = [2015, 2016]
        config_path.write_text(json.dumps(doc))
        result = run_pipeline(PipelineConfig.load(config_path))
        assert result.ok
        assert any(p.name == "series_beta.csv" for p in result.artifacts)
        assert len(result.artifacts) == 7

    def test_runs_are_byte_identical(self, tmp_path):
        config_path, doc = small_config(tmp_path)
        config = PipelineConfig.load(config_path)
        first = run_pipeline(config)
        second_dir = tmp_path / "out2"
        second = run_pipeline(
            PipelineConfig.load(config_path, {"output_dir": str(second_dir)})
        )
        assert first.ok and second.ok
        for a, b in zip(sorted(first.artifacts), sorted(second.artifacts)):
            assert a.name == b.name
            assert a.read_bytes() == b.read_bytes(), a.name

    def test_one_bad_crop_does_not_block_the_other(self, tmp_path):
        config_path, doc = small_config(tmp_path, crops=("Alpha", "Ghost"))
        (tmp_path / "data" / "ghost.csv").unlink()  # Ghost really has no data
        result = run_pipeline(PipelineConfig.load(config_path))
        assert not result.ok
        assert any(crop == "Ghost" and stage == "series" for crop, stage, _ in result.errors)
        assert any(p.name == "leaderboard_alpha.csv" for p in result.artifacts)

    def test_scenario_is_solved_with_champion_prices(self, tmp_path):
        scenario = {
            "total_land_acres": 5,
            "budget_inr": 50000,
            "storage_kg": 20000,
            "crops": [
                {
                    "name": "Alpha",
                    "cost_per_acre_inr": 9000,
                    "yield_kg_per_acre": 1200,
                    "cost_price_per_kg_inr": 18.0,
                }
            ],
        }
        scenario_path = tmp_path / "scenario.json"
        scenario_path.write_text(json.dumps(scenario))
        config_path, doc = small_config(tmp_path, scenario=str(scenario_path))
        result = run_pipeline(PipelineConfig.load(config_path))
        assert result.ok
        assert result.solution is not None
        assert result.solution.status == "optimal"
        assert any(p.name == "solution.json" for p in result.artifacts)

    def test_missing_data_dir_is_reported(self, tmp_path):
        config = PipelineConfig.from_dict(
            {"data_dir": str(tmp_path / "nope"), "crops": ["X"],
             "output_dir": str(tmp_path / "out")}
        )
        with pytest.raises(Exception, match="nope"):
            run_pipeline(config)


class TestCliCommands:
    def test_run_exit_zero(self, tmp_path, capsys):
        config_path, _ = small_config(tmp_path)
        assert main(["run", "--config", str(config_path)]) == 0
        out = capsys.readouterr().out
        assert "leaderboard_alpha.csv" in out

    def test_run_missing_data_dir_names_it(self, tmp_path, capsys):
        config_path, doc = small_config(tmp_path)
        doc["data_dir"] = str(tmp_path / "missing_dir")
        config_path.write_text(json.dumps(doc))
        assert main(["run", "--config", str(config_path)]) == 1
        assert "missing_dir" in capsys.readouterr().err

    def test_flag_overrides_config(self, tmp_path):
        config_path, doc = small_config(tmp_path)
        override_out = tmp_path / "flagged"
        code = main([
            "run", "--config", str(config_path), "--output-dir", str(override_out),
        ])
        assert code == 0
        assert (override_out / "champion_alpha.json").exists()

    def test_env_var_overrides_config_output_dir(self, tmp_path, monkeypatch):
        config_path, _ = small_config(tmp_path)
        env_out = tmp_path / "env_out"
        monkeypatch.setenv(OUTPUT_DIR_ENV, str(env_out))
        assert main(["run", "--config", str(config_path)]) == 0
        assert (env_out / "forecast_alpha.csv").exists()

    def test_ingest_command(self, tmp_path, capsys):
        raw = tmp_path / "raw.csv"
        start = date(2015, 1, 5)
        rows = ["Centre,Week Date,Commodity,Retail Price"]
        for i in range(12):
            d = (start + timedelta(weeks=i)).strftime("%d-%m-%Y")
            rows.append(f"R1,{d},Rice,{20 + 0.1 * i:.2f}")
        raw.write_text("\n".join(rows) + "\n")
        out = tmp_path / "rice.csv"
        code = main([
            "ingest", "--raw", str(raw), "--crop", "Rice",
            "--column-map",
            json.dumps({"Centre": "region", "Week Date": "date",
                        "Commodity": "commodity", "Retail Price": "price"}),
            "--year-start", "2015", "--year-end", "2015",
            "--out", str(out),
        ])
        assert code == 0
        assert out.read_text().splitlines()[0] == "week_date,mean_price"

    def test_eda_command_prints_report(self, tmp_path, capsys):
        series_path = tmp_path / "alpha.csv"
        write_series_csv(small_series(), series_path)
        code = main(["eda", "--series", str(series_path), "--crop", "Alpha"])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["verdict"] in ("stationary", "non_stationary")
        assert set(doc["critical_values"]) == {"1%", "5%", "10%"}

    def test_evaluate_command_csv(self, tmp_path, capsys):
        config_path, _ = small_config(tmp_path)
        code = main([
            "evaluate", "--config", str(config_path), "--crop", "Alpha",
            "--format", "csv",
        ])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "Models,RMSE,RMSEP,MAPE"
        assert len(lines) == 11  # ten model rows

    def test_evaluate_command_json(self, tmp_path, capsys):
        config_path, _ = small_config(tmp_path)
        code = main([
            "evaluate", "--config", str(config_path), "--crop", "Alpha",
            "--format", "json",
        ])
        assert code == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["crop"] == "Alpha"
        assert len(doc["rows"]) == 10
        assert {"rmse", "rmsep", "mape"} <= set(doc["rows"][0])

    def test_optimize_command_reproduces_sample_problem(self, tmp_path, capsys):
        scenario = {
            "total_land_acres": 20,
            "budget_inr": 200000,
            "storage_kg": 40000,
            "crops": [
                {"name": "Rice", "cost_per_acre_inr": 22500, "yield_kg_per_acre": 3000,
                 "cost_price_per_kg_inr": 29.5, "forecast_price_per_kg_inr": 34.0},
                {"name": "Maize", "cost_per_acre_inr": 15000, "yield_kg_per_acre": 3000,
                 "cost_price_per_kg_inr": 15.0, "forecast_price_per_kg_inr": 22.0},
                {"name": "Jowar", "cost_per_acre_inr": 7000, "yield_kg_per_acre": 1500,
                 "cost_price_per_kg_inr": 20.0, "forecast_price_per_kg_inr": 30.34},
                {"name": "Urad", "cost_per_acre_inr": 10600, "yield_kg_per_acre": 350,
                 "cost_price_per_kg_inr": 65.0, "forecast_price_per_kg_inr": 99.72},
            ],
        }
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(scenario))
        assert main(["optimize", "--scenario", str(path)]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["objective_inr"] == pytest.approx(347382.9, abs=1.0)
        assert doc["acres"]["Maize"] == pytest.approx(7.1918, abs=0.005)

    def test_forecast_command_emits_weekly_rows(self, tmp_path, capsys):
        config_path, _ = small_config(tmp_path)
        code = main([
            "forecast", "--config", str(config_path), "--crop", "Alpha",
            "--format", "csv",
        ])
        assert code == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "week_date,predicted_price"
        assert len(lines) == 7  # header + horizon_weeks


class TestConfigPrecedence:
    def test_unknown_config_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"data_dir": ".", "bogus_key": 1}))
        with pytest.raises(Exception, match="bogus_key"):
            PipelineConfig.load(path)

    def test_override_wins_over_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"data_dir": "file_dir", "cv_folds": 4}))
        config = PipelineConfig.load(path, {"cv_folds": 7})
        assert config.cv_folds == 7
        assert config.data_dir == "file_dir"


def test_synthetic_series_is_deterministic():
    a = make_weekly_series("X", 40, seed=5)
    b = make_weekly_series("X", 40, seed=5)
    assert np.array_equal(a.values, b.values)
    assert a.dates == b.dates


def test_make_series_helper_invariants():
    series = make_series([3.0, 4.0, 5.0])
    assert len(series) == 3
