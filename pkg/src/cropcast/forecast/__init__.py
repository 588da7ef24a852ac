"""Ten forecasting model families behind one fit/predict interface."""

from __future__ import annotations

import numpy as np

from ..exceptions import ParameterError
from ..ingest import PriceSeries
from . import baselines, sarimax, smoothing
from .model import (
    BASELINE_FAMILIES,
    FAMILIES,
    Forecast,
    ForecastModelSpec,
    FittedModel,
    MODEL_SCHEMA_VERSION,
    SARIMAX_FAMILIES,
    SMOOTHING_FAMILIES,
    SarimaxOrder,
    forecast_dates,
    model_from_json,
    model_to_json,
    param_count,
)
from .baselines import fit_baseline
from .sarimax import OrderGrid, fit_sarimax, information_criteria, select_order
from .smoothing import fit_smoothing

__all__ = [
    "BASELINE_FAMILIES",
    "FAMILIES",
    "Forecast",
    "ForecastModelSpec",
    "FittedModel",
    "MODEL_SCHEMA_VERSION",
    "OrderGrid",
    "SARIMAX_FAMILIES",
    "SMOOTHING_FAMILIES",
    "SarimaxOrder",
    "fit",
    "fit_baseline",
    "fit_sarimax",
    "fit_smoothing",
    "forecast_dates",
    "information_criteria",
    "model_from_json",
    "model_to_json",
    "param_count",
    "predict",
    "select_order",
]


def fit(
    spec: ForecastModelSpec, train: PriceSeries, exog: np.ndarray | None = None
) -> FittedModel:
    """Fit any model family on a training series."""
    if spec.family in BASELINE_FAMILIES:
        if exog is not None:
            raise ParameterError(f"{spec.family} does not accept exogenous regressors")
        return fit_baseline(spec, train)
    if spec.family in SMOOTHING_FAMILIES:
        if exog is not None:
            raise ParameterError(f"{spec.family} does not accept exogenous regressors")
        return fit_smoothing(spec, train)
    return fit_sarimax(
        spec.order,
        train,
        exog=exog,
        with_constant=spec.with_constant,
        family=spec.family,
    )


def predict(
    model: FittedModel, horizon: int, future_exog: np.ndarray | None = None
) -> Forecast:
    """Forecast `horizon` weekly steps past the end of the training window."""
    if horizon < 1:
        raise ParameterError(f"horizon must be >= 1, got {horizon}")
    family = model.spec.family
    if family in BASELINE_FAMILIES:
        values = baselines.forecast_values(model, horizon)
    elif family in SMOOTHING_FAMILIES:
        values = smoothing.forecast_values(model, horizon)
    elif family in SARIMAX_FAMILIES:
        values = sarimax.forecast_values(model, horizon, future_exog)
    else:
        raise ParameterError(f"unknown model family {family!r}")
    dates = forecast_dates(model.last_train_date, horizon)
    points = tuple((d, float(v)) for d, v in zip(dates, values))
    return Forecast(crop=model.crop, points=points, horizon=horizon)
