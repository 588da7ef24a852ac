"""Model specs, fitted-model state, and forecast containers."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from datetime import date, timedelta

from ..exceptions import ParameterError

MODEL_SCHEMA_VERSION = 1

BASELINE_FAMILIES = ("linear_regression", "naive", "simple_average", "moving_average")
SMOOTHING_FAMILIES = ("ses", "holt", "holt_winters_additive", "holt_winters_multiplicative")
SARIMAX_FAMILIES = ("arima", "sarimax")
FAMILIES = BASELINE_FAMILIES + SMOOTHING_FAMILIES + SARIMAX_FAMILIES

_HW_FAMILIES = ("holt_winters_additive", "holt_winters_multiplicative")


@dataclass(frozen=True)
class SarimaxOrder:
    """Differencing/AR/MA orders (p,d,q) with seasonal part (P,D,Q,s).

    s == 0 means no seasonal part, which is plain ARIMA.
    """

    p: int
    d: int
    q: int
    P: int = 0
    D: int = 0
    Q: int = 0
    s: int = 0

    def __post_init__(self) -> None:
        for name in ("p", "d", "q", "P", "D", "Q", "s"):
            if getattr(self, name) < 0:
                raise ParameterError(f"order component {name} must be >= 0")
        if self.s == 0 and (self.P or self.D or self.Q):
            raise ParameterError("seasonal orders require s > 0")
        if self.s == 1:
            raise ParameterError("seasonal period s must be 0 or >= 2")

    @property
    def n_params(self) -> int:
        """Estimated AR/MA coefficient count (differencing is not estimated)."""
        return self.p + self.q + self.P + self.Q

    def label(self) -> str:
        base = f"({self.p},{self.d},{self.q})"
        if self.s:
            return base + f"({self.P},{self.D},{self.Q},{self.s})"
        return base

    def as_dict(self) -> dict:
        return {
            "p": self.p, "d": self.d, "q": self.q,
            "P": self.P, "D": self.D, "Q": self.Q, "s": self.s,
        }


@dataclass(frozen=True)
class ForecastModelSpec:
    """Declarative choice of one forecasting model.

    Smoothing parameters left as None are optimized at fit time. The
    initial_* fields override the documented state initializations; they
    exist for diagnostics and for exercising the model-reduction identities.
    """

    family: str
    window: int | None = None
    alpha: float | None = None
    beta: float | None = None
    gamma: float | None = None
    seasonal_period: int | None = None
    order: SarimaxOrder | None = None
    with_constant: bool = False
    initial_level: float | None = None
    initial_trend: float | None = None
    initial_seasonals: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        f = self.family
        if f not in FAMILIES:
            raise ParameterError(f"unknown model family {f!r}")
        if f == "moving_average":
            if self.window is None or self.window < 1:
                raise ParameterError("moving_average requires window >= 1")
        elif self.window is not None:
            raise ParameterError(f"window is meaningless for family {f!r}")
        for name, allowed in (
            ("alpha", SMOOTHING_FAMILIES),
            ("beta", ("holt",) + _HW_FAMILIES),
            ("gamma", _HW_FAMILIES),
        ):
            value = getattr(self, name)
            if value is not None:
                if f not in allowed:
                    raise ParameterError(f"{name} is meaningless for family {f!r}")
                if not (0.0 <= value <= 1.0):
                    raise ParameterError(f"{name} must be in [0,1], got {value}")
        if f in _HW_FAMILIES:
            if self.seasonal_period is None or self.seasonal_period < 2:
                raise ParameterError(f"{f} requires seasonal_period >= 2")
        elif self.seasonal_period is not None:
            raise ParameterError(f"seasonal_period is meaningless for family {f!r}")
        if f in SARIMAX_FAMILIES:
            if self.order is None:
                raise ParameterError(f"{f} requires an order")
            if f == "arima" and self.order.s != 0:
                raise ParameterError("arima order must have s == 0; use family sarimax")
        else:
            if self.order is not None:
                raise ParameterError(f"order is meaningless for family {f!r}")
            if self.with_constant:
                raise ParameterError("with_constant applies to arima/sarimax only")
        if self.initial_level is not None and f not in SMOOTHING_FAMILIES:
            raise ParameterError("initial_level applies to smoothing families only")
        if self.initial_trend is not None and f not in ("holt",) + _HW_FAMILIES:
            raise ParameterError("initial_trend applies to holt / holt_winters only")
        if self.initial_seasonals is not None:
            if f not in _HW_FAMILIES:
                raise ParameterError("initial_seasonals applies to holt_winters only")
            if len(self.initial_seasonals) != self.seasonal_period:
                raise ParameterError(
                    f"initial_seasonals must have length {self.seasonal_period}"
                )

    def label(self) -> str:
        if self.family == "moving_average":
            return f"moving_average({self.window})"
        if self.family in _HW_FAMILIES:
            return f"{self.family}({self.seasonal_period})"
        if self.family in SARIMAX_FAMILIES:
            return f"{self.family}{self.order.label()}"
        return self.family

    def as_dict(self) -> dict:
        doc: dict = {"family": self.family}
        if self.window is not None:
            doc["window"] = self.window
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) is not None:
                doc[name] = getattr(self, name)
        if self.seasonal_period is not None:
            doc["seasonal_period"] = self.seasonal_period
        if self.order is not None:
            doc["order"] = self.order.as_dict()
        if self.with_constant:
            doc["with_constant"] = True
        if self.initial_level is not None:
            doc["initial_level"] = self.initial_level
        if self.initial_trend is not None:
            doc["initial_trend"] = self.initial_trend
        if self.initial_seasonals is not None:
            doc["initial_seasonals"] = list(self.initial_seasonals)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "ForecastModelSpec":
        kwargs = dict(doc)
        if "order" in kwargs and kwargs["order"] is not None:
            kwargs["order"] = SarimaxOrder(**kwargs["order"])
        if "initial_seasonals" in kwargs and kwargs["initial_seasonals"] is not None:
            kwargs["initial_seasonals"] = tuple(kwargs["initial_seasonals"])
        return cls(**kwargs)


def param_count(spec: ForecastModelSpec) -> int:
    """Number of fitted parameters, used for champion tie-breaking."""
    if spec.family in ("naive", "simple_average"):
        return 0
    if spec.family == "moving_average":
        return 1
    if spec.family == "linear_regression":
        return 2
    if spec.family == "ses":
        return 1
    if spec.family == "holt":
        return 2
    if spec.family in _HW_FAMILIES:
        return 3
    return spec.order.n_params + int(spec.with_constant)


@dataclass
class FittedModel:
    """A model spec plus the end-of-training state needed to forecast.

    Refitting on identical data yields an identical FittedModel; predict is
    a pure function of this object and the horizon.
    """

    spec: ForecastModelSpec
    crop: str
    last_train_date: date
    train_length: int
    state: dict
    train_sse: float | None = None
    log_likelihood: float | None = None
    aic: float | None = None
    bic: float | None = None
    warnings: tuple[str, ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Forecast:
    """Point forecasts continuing the weekly grid after the train window."""

    crop: str
    points: tuple[tuple[date, float], ...]
    horizon: int

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ParameterError(f"horizon must be >= 1, got {self.horizon}")
        if len(self.points) != self.horizon:
            raise ParameterError("forecast must contain exactly `horizon` points")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.points)

    @property
    def dates(self) -> tuple[date, ...]:
        return tuple(d for d, _ in self.points)


def forecast_dates(last_train_date: date, horizon: int) -> tuple[date, ...]:
    return tuple(last_train_date + timedelta(weeks=h) for h in range(1, horizon + 1))


def model_to_json(model: FittedModel) -> str:
    """Serialize a fitted model so the service can cache it across requests."""
    doc = {
        "schema_version": MODEL_SCHEMA_VERSION,
        "crop": model.crop,
        "spec": model.spec.as_dict(),
        "last_train_date": model.last_train_date.isoformat(),
        "train_length": model.train_length,
        "state": model.state,
        "train_sse": model.train_sse,
        "log_likelihood": model.log_likelihood,
        "aic": model.aic,
        "bic": model.bic,
        "warnings": list(model.warnings),
    }
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str) -> FittedModel:
    doc = json.loads(text)
    version = doc.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise ParameterError(f"unsupported model schema_version {version!r}")
    return FittedModel(
        spec=ForecastModelSpec.from_dict(doc["spec"]),
        crop=doc["crop"],
        last_train_date=date.fromisoformat(doc["last_train_date"]),
        train_length=doc["train_length"],
        state=doc["state"],
        train_sse=doc["train_sse"],
        log_likelihood=doc["log_likelihood"],
        aic=doc["aic"],
        bic=doc["bic"],
        warnings=tuple(doc["warnings"]),
    )


def with_params(spec: ForecastModelSpec, **kwargs) -> ForecastModelSpec:
    """Copy of the spec with optimized parameter values filled in."""
    return replace(spec, **kwargs)
