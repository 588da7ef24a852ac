"""Error metrics, model leaderboards, rolling CV, and champion selection."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    CropcastError,
    EmptyLeaderboardError,
    NoChampionError,
    ParameterError,
    UndefinedMetricError,
)
from .forecast import Forecast, ForecastModelSpec, fit, param_count, predict
from .ingest import PriceSeries
from .series import rolling_cv_splits, train_test_split

_FIT_FAILURES = (CropcastError, np.linalg.LinAlgError, FloatingPointError)


def _check_lengths(actual, predicted) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(actual, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if a.shape != p.shape or a.ndim != 1:
        raise ParameterError(f"length mismatch: actual {a.shape}, predicted {p.shape}")
    if len(a) == 0:
        raise ParameterError("metrics need at least one observation")
    return a, p


def rmse(actual, predicted) -> float:
    """Root mean squared error."""
    a, p = _check_lengths(actual, predicted)
    return float(np.sqrt(np.mean((a - p) ** 2)))


def rmsep(actual, predicted) -> float:
    """RMSE as a percentage of the mean of the actuals.

    Within one test set this makes every model's rmsep a fixed multiple of
    its rmse, so the rmsep/rmse ratio is constant across a leaderboard.
    """
    a, p = _check_lengths(actual, predicted)
    denom = float(np.mean(a))
    if denom <= 0:
        raise UndefinedMetricError(f"rmsep undefined: mean of actuals is {denom}")
    return 100.0 * rmse(a, p) / denom


def mape(actual, predicted) -> float:
    """Mean absolute percentage error."""
    a, p = _check_lengths(actual, predicted)
    if np.any(a == 0):
        raise UndefinedMetricError("mape undefined: an actual value is 0")
    return float(100.0 * np.mean(np.abs((a - p) / a)))


@dataclass(frozen=True)
class MetricReport:
    """All three error metrics for one model on one train/test window."""

    model: ForecastModelSpec
    rmse: float
    rmsep: float
    mape: float
    fold_index: int | None = None
    failed: bool = False
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "model": self.model.label(),
            "spec": self.model.as_dict(),
            "rmse": _num(self.rmse),
            "rmsep": _num(self.rmsep),
            "mape": _num(self.mape),
            "fold_index": self.fold_index,
            "failed": self.failed,
            "error": self.error,
        }


@dataclass(frozen=True)
class Leaderboard:
    """One row per model family, all evaluated on the same train/test split."""

    crop: str
    rows: tuple[MetricReport, ...]
    train_end: int
    test_end: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "crop": self.crop,
                "split": {"train_end": self.train_end, "test_end": self.test_end},
                "rows": [r.as_dict() for r in self.rows],
            },
            indent=2,
        )

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("Models,RMSE,RMSEP,MAPE\n")
        for r in self.rows:
            out.write(f"{r.model.label()},{_cell(r.rmse)},{_cell(r.rmsep)},{_cell(r.mape)}\n")
        return out.getvalue()


@dataclass(frozen=True)
class CvReport:
    """Per-fold metrics for one model under rolling-origin cross-validation."""

    crop: str
    model: ForecastModelSpec
    per_fold: tuple[MetricReport, ...]
    mean_rmse: float
    mean_mape: float
    failed: bool = False

    def as_dict(self) -> dict:
        return {
            "crop": self.crop,
            "model": self.model.label(),
            "spec": self.model.as_dict(),
            "per_fold": [r.as_dict() for r in self.per_fold],
            "mean_rmse": _num(self.mean_rmse),
            "mean_mape": _num(self.mean_mape),
            "failed": self.failed,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)


def _num(x: float | None):
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return x


def _cell(x: float) -> str:
    return "" if math.isnan(x) else f"{x:.6f}"


def _score(
    spec: ForecastModelSpec,
    train: PriceSeries,
    test: PriceSeries,
    fold_index: int | None,
) -> MetricReport:
    try:
        model = fit(spec, train)
        forecast = predict(model, len(test))
        predicted = np.asarray(forecast.values)
        return MetricReport(
            model=model.spec,
            rmse=rmse(test.values, predicted),
            rmsep=rmsep(test.values, predicted),
            mape=mape(test.values, predicted),
            fold_index=fold_index,
        )
    except _FIT_FAILURES as exc:
        return MetricReport(
            model=spec,
            rmse=float("nan"),
            rmsep=float("nan"),
            mape=float("nan"),
            fold_index=fold_index,
            failed=True,
            error=f"{type(exc).__name__}: {exc}",
        )


def evaluate_all(
    series: PriceSeries, specs: list[ForecastModelSpec], test_fraction: float
) -> Leaderboard:
    """Score every spec on one train/test split, in input order.

    A spec whose fit or forecast fails produces a flagged row instead of
    aborting the board.

    Raises:
        EmptyLeaderboardError: every spec failed.
    """
    if not specs:
        raise ParameterError("specs must be nonempty")
    train, test = train_test_split(series, test_fraction)
    rows = tuple(_score(spec, train, test, None) for spec in specs)
    if all(r.failed for r in rows):
        raise EmptyLeaderboardError(
            f"every model failed on crop {series.crop!r}: "
            + "; ".join(r.error or "" for r in rows)
        )
    return Leaderboard(
        crop=series.crop, rows=rows, train_end=len(train), test_end=len(series)
    )


def rolling_cross_validate(
    series: PriceSeries, specs: list[ForecastModelSpec], k: int
) -> list[CvReport]:
    """Fit and score every spec on each expanding-window fold.

    Fold failures are kept as flagged entries; fold means are taken over the
    successful folds only. A spec that fails on every fold yields a report
    flagged failed.
    """
    if not specs:
        raise ParameterError("specs must be nonempty")
    splits = rolling_cv_splits(series, k)
    reports = []
    for spec in specs:
        per_fold = []
        for split in splits:
            train = series.slice(0, split.train_end)
            test = series.slice(split.train_end, split.test_end)
            per_fold.append(_score(spec, train, test, split.fold_index))
        ok = [r for r in per_fold if not r.failed]
        reports.append(
            CvReport(
                crop=series.crop,
                model=ok[0].model if ok else spec,
                per_fold=tuple(per_fold),
                mean_rmse=float(np.mean([r.rmse for r in ok])) if ok else float("nan"),
                mean_mape=float(np.mean([r.mape for r in ok])) if ok else float("nan"),
                failed=not ok,
            )
        )
    return reports


def select_champion(reports: list[CvReport]) -> ForecastModelSpec:
    """The spec with the lowest mean cross-validated MAPE.

    Ties break by lower mean RMSE, then fewer model parameters, then the
    model label, so the choice is invariant under permutation of the input.

    Raises:
        NoChampionError: every report is flagged failed.
    """
    if not reports:
        raise ParameterError("reports must be nonempty")
    crops = {r.crop for r in reports}
    if len(crops) > 1:
        raise ParameterError(f"reports mix crops: {sorted(crops)}")
    viable = [r for r in reports if not r.failed]
    if not viable:
        raise NoChampionError(f"all models failed cross-validation for {reports[0].crop!r}")
    best = min(
        viable,
        key=lambda r: (r.mean_mape, r.mean_rmse, param_count(r.model), r.model.label()),
    )
    return best.model


def cv_table_csv(reports: list[CvReport]) -> str:
    """Fold-level CSV in the Models,RMSE,RMSEP,MAPE layout."""
    out = io.StringIO()
    out.write("Models,RMSE,RMSEP,MAPE\n")
    for report in reports:
        for fold in report.per_fold:
            name = f"{report.model.label()}_split{fold.fold_index}"
            out.write(f"{name},{_cell(fold.rmse)},{_cell(fold.rmsep)},{_cell(fold.mape)}\n")
    return out.getvalue()


def plot_data_rows(
    series: PriceSeries,
    test_predictions: Forecast | None = None,
    future_forecast: Forecast | None = None,
) -> list[tuple[str, str, str]]:
    """(date, actual-or-absent, predicted-or-absent) rows for external plotting.

    Historical dates carry actuals; dates inside the held-out window also
    carry the model's predictions; dates past the series end carry only the
    forecast continuation. Absent cells are empty strings.
    """
    predicted: dict = {}
    if test_predictions is not None:
        predicted.update(dict(test_predictions.points))
    rows = []
    for d, v in series.points:
        pred = predicted.get(d)
        rows.append((d.isoformat(), f"{v:.6f}", "" if pred is None else f"{pred:.6f}"))
    if future_forecast is not None:
        for d, v in future_forecast.points:
            rows.append((d.isoformat(), "", f"{v:.6f}"))
    return rows


def write_plot_data_csv(path, rows: list[tuple[str, str, str]]) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("date,actual,predicted\n")
        for r in rows:
            fh.write(",".join(r) + "\n")
