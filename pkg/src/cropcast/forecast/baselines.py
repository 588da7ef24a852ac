"""The four baseline families: OLS-on-time, naive, simple and moving average."""

from __future__ import annotations

import numpy as np

from ..exceptions import InsufficientDataError, ParameterError
from ..ingest import PriceSeries
from .model import BASELINE_FAMILIES, FittedModel, ForecastModelSpec


def fit_baseline(spec: ForecastModelSpec, train: PriceSeries) -> FittedModel:
    """Fit one of the baseline families on a training series.

    linear_regression regresses price on the integer time index 0..n-1;
    naive keeps the last observation; simple_average the mean of all
    observations; moving_average the mean of the last `window` observations.
    All four forecast a flat or linear continuation.
    """
    if spec.family not in BASELINE_FAMILIES:
        raise ParameterError(f"not a baseline family: {spec.family!r}")
    y = train.values
    n = len(y)
    if n < 2:
        raise InsufficientDataError(f"baseline fit needs >= 2 points, got {n}")

    if spec.family == "linear_regression":
        t = np.arange(n, dtype=float)
        slope, intercept = np.polyfit(t, y, 1)
        fitted = intercept + slope * t
        state = {"intercept": float(intercept), "slope": float(slope)}
        sse = float(np.sum((y - fitted) ** 2))
    elif spec.family == "naive":
        state = {"last_value": float(y[-1])}
        sse = float(np.sum(np.diff(y) ** 2))
    elif spec.family == "simple_average":
        mean = float(np.mean(y))
        state = {"mean": mean}
        sse = float(np.sum((y - mean) ** 2))
    else:  # moving_average
        k = spec.window
        if k > n:
            raise ParameterError(f"moving_average window {k} exceeds train length {n}")
        state = {"window_mean": float(np.mean(y[-k:]))}
        trailing = np.convolve(y, np.ones(k) / k, mode="valid")[:-1]
        sse = float(np.sum((y[k:] - trailing) ** 2)) if n > k else 0.0

    return FittedModel(
        spec=spec,
        crop=train.crop,
        last_train_date=train.last_date,
        train_length=n,
        state=state,
        train_sse=sse,
    )


def forecast_values(model: FittedModel, horizon: int) -> np.ndarray:
    family = model.spec.family
    state = model.state
    h = np.arange(1, horizon + 1, dtype=float)
    if family == "linear_regression":
        return state["intercept"] + state["slope"] * (model.train_length - 1 + h)
    if family == "naive":
        return np.full(horizon, state["last_value"])
    if family == "simple_average":
        return np.full(horizon, state["mean"])
    if family == "moving_average":
        return np.full(horizon, state["window_mean"])
    raise ParameterError(f"not a baseline family: {family!r}")
