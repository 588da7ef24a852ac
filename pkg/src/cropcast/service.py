"""HTTP/JSON facade over the forecasting and portfolio modules.

The service is a pure pass-through: every response body is produced by the
same canonical serializers a library caller would use, so a request's
response matches the corresponding library call byte for byte. Champion
models are fitted lazily, once per crop, and cached immutably for the life
of the process.
"""

from __future__ import annotations

import json
import threading
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import forecast as fc
from .evaluate import Leaderboard
from .exceptions import CropcastError
from .pipeline import CropAnalysis, PipelineConfig, analyze_crop, crop_slug
from .portfolio import scenario_from_dict, solve_portfolio
from .ingest import PriceSeries, read_series_csv

DEFAULT_HORIZON = 52

ECONOMICS_FIELDS = (
    "cost_per_acre_inr",
    "yield_kg_per_acre",
    "cost_price_per_kg_inr",
    "forecast_price_per_kg_inr",
)


def bundled_data_dir() -> Path:
    return Path(resources.files("cropcast") / "data")


class CropIn(BaseModel):
    name: str = Field(min_length=1)
    cost_per_acre_inr: float = Field(gt=0)
    yield_kg_per_acre: float = Field(gt=0)
    cost_price_per_kg_inr: float
    forecast_price_per_kg_inr: float | None = None


class ScenarioRequest(BaseModel):
    """Mirrors the scenario JSON, plus the horizon used to price crops
    whose forecast price is not supplied explicitly."""

    total_land_acres: float = Field(gt=0)
    budget_inr: float = Field(gt=0)
    storage_kg: float = Field(gt=0)
    horizon_weeks: int = Field(default=DEFAULT_HORIZON, ge=1)
    crops: list[CropIn] = Field(min_length=1)


def error_body(code: str, message: str, field_errors: list[dict] | None = None) -> dict:
    return {"code": code, "message": message, "field_errors": field_errors or []}


def crops_json(entries: list[dict], defaults: dict) -> str:
    """Canonical serialization of the crop catalog and scenario defaults."""
    return json.dumps({"defaults": defaults, "crops": entries}, indent=2)


def forecast_json(
    forecast: fc.Forecast,
    champion_spec: fc.ForecastModelSpec,
    history: PriceSeries,
) -> str:
    """Canonical serialization of a champion forecast plus its history."""
    return json.dumps(
        {
            "crop": forecast.crop,
            "champion": champion_spec.label(),
            "champion_spec": champion_spec.as_dict(),
            "horizon": forecast.horizon,
            "history": [
                {"week_date": d.isoformat(), "price_inr": float(v)}
                for d, v in history.points
            ],
            "points": [
                {"week_date": d.isoformat(), "price_inr": v}
                for d, v in forecast.points
            ],
        },
        indent=2,
    )


class ServiceState:
    """Immutable-after-init data plus a lazily filled champion cache."""

    def __init__(self, data_dir: Path, economics: dict, config: PipelineConfig):
        self.data_dir = data_dir
        self.economics = economics
        self.config = config
        self.series: dict[str, PriceSeries] = {}
        for entry in economics.get("crops", []):
            path = data_dir / f"{crop_slug(entry['name'])}.csv"
            if path.exists():
                self.series[entry["name"]] = read_series_csv(path, entry["name"])
        self._analyses: dict[str, CropAnalysis] = {}
        self._locks: dict[str, threading.Lock] = {
            name: threading.Lock() for name in self.series
        }

    def crop_entries(self) -> list[dict]:
        entries = []
        for entry in self.economics.get("crops", []):
            entries.append(
                {
                    "name": entry["name"],
                    "economics": {k: entry.get(k) for k in ECONOMICS_FIELDS},
                    "available": entry["name"] in self.series,
                }
            )
        return entries

    def scenario_defaults(self) -> dict:
        return {
            key: self.economics.get(key)
            for key in ("total_land_acres", "budget_inr", "storage_kg")
        }

    def analysis(self, crop: str) -> CropAnalysis:
        cached = self._analyses.get(crop)
        if cached is not None:
            return cached
        with self._locks[crop]:
            cached = self._analyses.get(crop)
            if cached is None:
                cached = analyze_crop(self.series[crop], self.config)
                self._analyses[crop] = cached
        return cached

    def mean_forecast_price(self, crop: str, horizon: int) -> float:
        model = self.analysis(crop).champion_model
        forecast = fc.predict(model, horizon)
        return float(sum(forecast.values) / len(forecast.values))


def load_economics(path: Path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def create_app(
    data_dir: str | Path | None = None,
    economics_path: str | Path | None = None,
    seasonal_period: int = 52,
    cv_folds: int = 4,
    test_fraction: float = 0.2,
    moving_average_window: int = 4,
    arima_grid: dict | None = None,
    sarimax_grid: dict | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    """Build the service; with no arguments it serves the bundled demo data."""
    data_dir = Path(data_dir) if data_dir else bundled_data_dir()
    if economics_path is None:
        candidate = data_dir / "economics.json"
        economics_path = (
            candidate if candidate.exists() else bundled_data_dir() / "default_economics.json"
        )
    economics = load_economics(Path(economics_path))
    config_kwargs = dict(
        data_dir=str(data_dir),
        crops=tuple(e["name"] for e in economics.get("crops", [])),
        seasonal_period=seasonal_period,
        cv_folds=cv_folds,
        test_fraction=test_fraction,
        moving_average_window=moving_average_window,
    )
    if arima_grid is not None:
        config_kwargs["arima_grid"] = arima_grid
    if sarimax_grid is not None:
        config_kwargs["sarimax_grid"] = sarimax_grid
    state = ServiceState(data_dir, economics, PipelineConfig(**config_kwargs))

    app = FastAPI(title="cropcast", version="0.1.0")
    app.state.cropcast = state

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        field_errors = [
            {
                "field": ".".join(str(part) for part in err["loc"] if part != "body"),
                "message": err["msg"],
            }
            for err in exc.errors()
        ]
        return JSONResponse(
            status_code=400,
            content=error_body("validation_error", "request validation failed", field_errors),
        )

    @app.get("/api/crops")
    def get_crops() -> Response:
        body = crops_json(state.crop_entries(), state.scenario_defaults())
        return Response(body, media_type="application/json")

    @app.get("/api/forecast/{crop}")
    def get_forecast(crop: str, h: int = DEFAULT_HORIZON) -> Response:
        if crop not in state.series:
            return JSONResponse(
                status_code=404,
                content=error_body("not_found", f"unknown crop {crop!r}"),
            )
        if h < 1:
            return JSONResponse(
                status_code=400,
                content=error_body("bad_request", f"horizon must be >= 1, got {h}"),
            )
        try:
            analysis = state.analysis(crop)
            forecast = fc.predict(analysis.champion_model, h)
        except CropcastError as exc:
            return JSONResponse(
                status_code=500, content=error_body("model_error", str(exc))
            )
        body = forecast_json(forecast, analysis.champion_spec, analysis.series)
        return Response(body, media_type="application/json")

    @app.get("/api/leaderboard/{crop}")
    def get_leaderboard(crop: str) -> Response:
        if crop not in state.series:
            return JSONResponse(
                status_code=404,
                content=error_body("not_found", f"unknown crop {crop!r}"),
            )
        try:
            board: Leaderboard = state.analysis(crop).leaderboard
        except CropcastError as exc:
            return JSONResponse(
                status_code=500, content=error_body("model_error", str(exc))
            )
        return Response(board.to_json(), media_type="application/json")

    @app.post("/api/portfolio/solve")
    def post_portfolio_solve(request: ScenarioRequest) -> Response:
        names = [c.name for c in request.crops]
        if len(set(names)) != len(names):
            return JSONResponse(
                status_code=400,
                content=error_body(
                    "validation_error",
                    "duplicate crop names",
                    [{"field": "crops", "message": f"duplicate names in {names}"}],
                ),
            )
        doc = request.model_dump()
        field_errors = []
        for crop_doc in doc["crops"]:
            if crop_doc["forecast_price_per_kg_inr"] is None:
                name = crop_doc["name"]
                if name not in state.series:
                    field_errors.append(
                        {
                            "field": f"crops.{name}.forecast_price_per_kg_inr",
                            "message": "no forecast price given and no price data "
                            "available to derive one",
                        }
                    )
                    continue
                crop_doc["forecast_price_per_kg_inr"] = state.mean_forecast_price(
                    name, request.horizon_weeks
                )
        if field_errors:
            return JSONResponse(
                status_code=400,
                content=error_body(
                    "validation_error", "cannot price all crops", field_errors
                ),
            )
        scenario = scenario_from_dict(doc)
        solution = solve_portfolio(scenario)
        return Response(solution.to_json(), media_type="application/json")

    if ui_dir is not None and Path(ui_dir).exists():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
