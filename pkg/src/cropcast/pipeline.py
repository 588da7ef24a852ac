"""The end-to-end flow: load series, diagnose, rank models, forecast, solve.

Shared by the CLI and the HTTP service; the CLI adds argument parsing on
top, the service caches the per-crop champion models this module produces.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import evaluate as ev
from . import forecast as fc
from .exceptions import CropcastError, ParameterError
from .ingest import (
    PriceSeries,
    build_price_series,
    aggregate_weekly,
    parse_raw_csv,
    read_series_csv,
    write_series_csv,
)
from .portfolio import (
    PortfolioSolution,
    forecast_to_price,
    load_scenario,
    solve_portfolio,
)
from .series import adf_stationarity, train_test_split
from .synthetic import make_weekly_series

DEFAULT_MA_WINDOW = 4
DEFAULT_SEASONAL_PERIOD = 52
DEFAULT_ARIMA_GRID = {"p": [0, 1, 2], "d": [0, 1], "q": [0, 1]}
DEFAULT_SARIMAX_GRID = {
    "p": [0, 1], "d": [0, 1], "q": [0, 1],
    "P": [0, 1], "D": [0, 1], "Q": [0, 1],
}

OUTPUT_DIR_ENV = "CROPCAST_OUTPUT_DIR"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the pipeline needs, loadable from one JSON file."""

    data_dir: str = "."
    output_dir: str = "out"
    crops: tuple[str, ...] = ()
    year_range: tuple[int, int] = (2012, 2016)
    test_fraction: float = 0.2
    cv_folds: int = 4
    seasonal_period: int = DEFAULT_SEASONAL_PERIOD
    horizon_weeks: int = 52
    moving_average_window: int = DEFAULT_MA_WINDOW
    arima_grid: dict = field(default_factory=lambda: dict(DEFAULT_ARIMA_GRID))
    sarimax_grid: dict = field(default_factory=lambda: dict(DEFAULT_SARIMAX_GRID))
    scenario: str | None = None
    price_method: str = "mean"
    sale_week: int | None = None
    column_map: dict | None = None
    gap_policy: str = "interpolate"
    synthetic: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.cv_folds < 2:
            raise ParameterError(f"cv_folds must be >= 2, got {self.cv_folds}")
        if not (0 < self.test_fraction < 1):
            raise ParameterError(
                f"test_fraction must be in (0,1), got {self.test_fraction}"
            )

    @classmethod
    def load(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        """Config file plus overrides; override values win over file values."""
        with open(path) as fh:
            doc = json.load(fh)
        return cls.from_dict(doc, overrides)

    @classmethod
    def from_dict(cls, doc: dict, overrides: dict | None = None) -> "PipelineConfig":
        merged = dict(doc)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        known = set(cls.__dataclass_fields__)
        unknown = set(merged) - known
        if unknown:
            raise ParameterError(f"unknown config keys: {sorted(unknown)}")
        if "crops" in merged:
            merged["crops"] = tuple(merged["crops"])
        if "year_range" in merged:
            merged["year_range"] = tuple(merged["year_range"])
        return cls(**merged)


def crop_slug(crop: str) -> str:
    return crop.strip().lower().replace(" ", "_")


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def build_catalog(
    seasonal_period: int,
    ma_window: int,
    arima_order: fc.SarimaxOrder | None,
    sarimax_order: fc.SarimaxOrder | None,
) -> list[fc.ForecastModelSpec]:
    """The ten-family model catalog, in leaderboard row order."""
    specs = [
        fc.ForecastModelSpec(family="linear_regression"),
        fc.ForecastModelSpec(family="naive"),
        fc.ForecastModelSpec(family="simple_average"),
        fc.ForecastModelSpec(family="moving_average", window=ma_window),
        fc.ForecastModelSpec(family="ses"),
        fc.ForecastModelSpec(family="holt"),
        fc.ForecastModelSpec(
            family="holt_winters_additive", seasonal_period=seasonal_period
        ),
        fc.ForecastModelSpec(
            family="holt_winters_multiplicative", seasonal_period=seasonal_period
        ),
    ]
    if arima_order is not None:
        specs.append(
            fc.ForecastModelSpec(family="arima", order=arima_order, with_constant=True)
        )
    if sarimax_order is not None:
        specs.append(
            fc.ForecastModelSpec(family="sarimax", order=sarimax_order, with_constant=True)
        )
    return specs


@dataclass
class CropAnalysis:
    """Everything the pipeline derives for one crop."""

    series: PriceSeries
    stationarity: object
    leaderboard: ev.Leaderboard
    cv_reports: list[ev.CvReport]
    champion_spec: fc.ForecastModelSpec
    champion_model: fc.FittedModel
    forecast: fc.Forecast
    test_predictions: fc.Forecast | None


def select_catalog(
    series: PriceSeries, config: PipelineConfig
) -> list[fc.ForecastModelSpec]:
    """The ten-family catalog with ARIMA/SARIMAX orders chosen on the train window."""
    train, _ = train_test_split(series, config.test_fraction)
    arima_order = _select(train, config.arima_grid, 0)
    sarimax_order = _select(train, config.sarimax_grid, config.seasonal_period)
    return build_catalog(
        config.seasonal_period, config.moving_average_window, arima_order, sarimax_order
    )


def analyze_crop(series: PriceSeries, config: PipelineConfig) -> CropAnalysis:
    """Stationarity, leaderboard, CV, champion choice, and horizon forecast."""
    stationarity = adf_stationarity(series.values)

    train, _ = train_test_split(series, config.test_fraction)
    catalog = select_catalog(series, config)

    leaderboard = ev.evaluate_all(series, catalog, config.test_fraction)
    cv_reports = ev.rolling_cross_validate(series, catalog, config.cv_folds)
    champion_spec = ev.select_champion(cv_reports)

    champion_model = fc.fit(champion_spec, series)
    horizon_fc = fc.predict(champion_model, config.horizon_weeks)

    test_predictions = None
    try:
        champion_on_train = fc.fit(champion_spec, train)
        test_predictions = fc.predict(champion_on_train, len(series) - len(train))
    except CropcastError:
        pass  # champion may need more data than the train window offers

    return CropAnalysis(
        series=series,
        stationarity=stationarity,
        leaderboard=leaderboard,
        cv_reports=cv_reports,
        champion_spec=champion_spec,
        champion_model=champion_model,
        forecast=horizon_fc,
        test_predictions=test_predictions,
    )


def _select(train: PriceSeries, grid_doc: dict, seasonal_period: int):
    doc = dict(grid_doc)
    if seasonal_period:
        doc.setdefault("s", seasonal_period)
    else:
        doc.pop("s", None)
    grid = fc.OrderGrid.from_dict(doc)
    try:
        return fc.select_order(train, grid, criterion="aic", with_constant=True)
    except CropcastError:
        return None


def load_series_for_crop(crop: str, config: PipelineConfig, crop_index: int = 0):
    """Resolve a crop to a PriceSeries plus the ingested-series artifact, if any.

    Prefers a canonical series file <slug>.csv in data_dir; falls back to a
    raw export <slug>_raw.csv (needs column_map in the config); finally, if
    the config enables synthetic data, generates a seeded demo series.
    Returns (series, ingested) where ingested says a raw file was aggregated
    and the canonical artifact should be written.
    """
    data_dir = Path(config.data_dir)
    slug = crop_slug(crop)
    canonical = data_dir / f"{slug}.csv"
    if canonical.exists():
        return read_series_csv(canonical, crop), False
    raw = data_dir / f"{slug}_raw.csv"
    if raw.exists():
        if not config.column_map:
            raise ParameterError(
                f"raw export {raw} requires a column_map in the config"
            )
        with open(raw) as fh:
            result = parse_raw_csv(fh, config.column_map)
        summaries = aggregate_weekly(result.records, crop)
        series = build_price_series(
            summaries, crop, config.year_range, config.gap_policy
        )
        return series, True
    if config.synthetic:
        return make_weekly_series(crop, seed=config.seed + crop_index), False
    raise ParameterError(
        f"no data for crop {crop!r}: neither {canonical} nor {raw} exists "
        f"(and synthetic generation is disabled)"
    )


@dataclass
class PipelineResult:
    artifacts: list[Path]
    errors: list[tuple[str, str, str]]  # (crop, stage, message)
    solution: PortfolioSolution | None = None

    @property
    def ok(self) -> bool:
        return not self.errors


def forecast_csv(forecast: fc.Forecast) -> str:
    lines = ["week_date,predicted_price"]
    for d, v in forecast.points:
        lines.append(f"{d.isoformat()},{v:.6f}")
    return "\n".join(lines) + "\n"


def champion_doc(analysis: CropAnalysis) -> dict:
    report = next(
        r for r in analysis.cv_reports
        if r.model.label() == analysis.champion_spec.label()
    )
    return {
        "crop": analysis.series.crop,
        "spec": analysis.champion_spec.as_dict(),
        "cv_mean_mape": report.mean_mape,
        "cv_mean_rmse": report.mean_rmse,
        "model": json.loads(fc.model_to_json(analysis.champion_model)),
    }


def run_pipeline(config: PipelineConfig) -> PipelineResult:
    """Run every stage for every crop; failures don't stop other crops.

    Writes, per crop: stationarity report, leaderboard table, CV table,
    champion spec, horizon forecast, and plot data (plus the canonical
    series file when a raw export was ingested). Then solves the scenario
    if one is configured.
    """
    if not config.crops:
        raise ParameterError("config.crops is empty")
    if not Path(config.data_dir).exists() and not config.synthetic:
        raise ParameterError(f"data_dir does not exist: {config.data_dir}")
    out_dir = Path(config.output_dir)
    artifacts: list[Path] = []
    errors: list[tuple[str, str, str]] = []
    analyses: dict[str, CropAnalysis] = {}

    def process(crop_and_index: tuple[int, str]):
        index, crop = crop_and_index
        slug = crop_slug(crop)
        written: list[Path] = []
        try:
            series, ingested = load_series_for_crop(crop, config, index)
        except (CropcastError, OSError) as exc:
            return crop, None, written, [("series", str(exc))]
        if ingested:
            path = out_dir / f"series_{slug}.csv"
            out_dir.mkdir(parents=True, exist_ok=True)
            write_series_csv(series, path)
            written.append(path)
        try:
            analysis = analyze_crop(series, config)
        except CropcastError as exc:
            return crop, None, written, [("analysis", str(exc))]
        files = {
            f"stationarity_{slug}.json": analysis.stationarity.to_json() + "\n",
            f"leaderboard_{slug}.csv": analysis.leaderboard.to_csv(),
            f"cv_{slug}.csv": ev.cv_table_csv(analysis.cv_reports),
            f"champion_{slug}.json": json.dumps(champion_doc(analysis), indent=2) + "\n",
            f"forecast_{slug}.csv": forecast_csv(analysis.forecast),
            f"plotdata_{slug}.csv": _plot_csv(analysis),
        }
        for name, text in files.items():
            path = out_dir / name
            atomic_write_text(path, text)
            written.append(path)
        return crop, analysis, written, []

    jobs = list(enumerate(config.crops))
    if len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=min(4, len(jobs))) as pool:
            outcomes = list(pool.map(process, jobs))
    else:
        outcomes = [process(jobs[0])]

    for crop, analysis, written, crop_errors in outcomes:
        artifacts.extend(written)
        for stage, message in crop_errors:
            errors.append((crop, stage, message))
        if analysis is not None:
            analyses[crop] = analysis

    solution = None
    if config.scenario:
        try:
            prices = {
                crop: forecast_to_price(
                    a.forecast.values, config.price_method, config.sale_week
                )
                for crop, a in analyses.items()
            }
            scenario = load_scenario(config.scenario, prices)
            solution = solve_portfolio(scenario)
            path = out_dir / "solution.json"
            atomic_write_text(path, solution.to_json() + "\n")
            artifacts.append(path)
        except (CropcastError, OSError, KeyError) as exc:
            errors.append(("-", "optimize", str(exc)))

    return PipelineResult(artifacts=artifacts, errors=errors, solution=solution)


def _plot_csv(analysis: CropAnalysis) -> str:
    rows = ev.plot_data_rows(
        analysis.series,
        test_predictions=analysis.test_predictions,
        future_forecast=analysis.forecast,
    )
    return "date,actual,predicted\n" + "\n".join(",".join(r) for r in rows) + "\n"


def resolve_output_dir(config: PipelineConfig, flag_value: str | None) -> PipelineConfig:
    """Precedence: --output-dir flag, then $CROPCAST_OUTPUT_DIR, then config."""
    if flag_value:
        return replace(config, output_dir=flag_value)
    env = os.environ.get(OUTPUT_DIR_ENV)
    if env:
        return replace(config, output_dir=env)
    return config
