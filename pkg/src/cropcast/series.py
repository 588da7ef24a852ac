"""Time-series utilities: splits, differencing, CV folds, stationarity."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegeneracyError,
    InsufficientDataError,
    ParameterError,
)
from .ingest import PriceSeries

# Large-sample Dickey-Fuller critical values, constant-only specification.
ADF_CRITICAL_VALUES = {"1%": -3.43, "5%": -2.86, "10%": -2.57}

VERDICT_STATIONARY = "stationary"
VERDICT_NON_STATIONARY = "non_stationary"


@dataclass(frozen=True)
class SplitSpec:
    """One expanding-window CV fold: train [0, train_end), test [train_end, test_end)."""

    fold_index: int
    train_end: int
    test_end: int

    def __post_init__(self) -> None:
        if self.fold_index < 1:
            raise ParameterError("fold_index must be >= 1")
        if not (0 < self.train_end < self.test_end):
            raise ParameterError(
                f"need 0 < train_end < test_end, got ({self.train_end}, {self.test_end})"
            )


@dataclass(frozen=True)
class StationarityReport:
    """Outcome of the unit-root test at the 5% level."""

    test_statistic: float
    critical_values: dict[str, float]
    lags_used: int
    verdict: str

    def to_json(self) -> str:
        return json.dumps(
            {
                "test_statistic": self.test_statistic,
                "critical_values": self.critical_values,
                "lags_used": self.lags_used,
                "verdict": self.verdict,
            },
            indent=2,
            sort_keys=True,
        )


def train_test_split(
    series: PriceSeries, test_fraction: float
) -> tuple[PriceSeries, PriceSeries]:
    """Split off the last ceil(n * test_fraction) points as the test set.

    Concatenating train and test reproduces the input exactly.
    """
    if not (0 < test_fraction < 1):
        raise ParameterError(f"test_fraction must be in (0,1), got {test_fraction}")
    n = len(series)
    if n < 4:
        raise InsufficientDataError(f"need at least 4 points to split, got {n}")
    test_len = math.ceil(n * test_fraction)
    train_len = n - test_len
    if train_len < 2:
        raise InsufficientDataError(
            f"split leaves train of {train_len} points; need at least 2"
        )
    return series.slice(0, train_len), series.slice(train_len, n)


def rolling_cv_splits(series: PriceSeries, k: int) -> list[SplitSpec]:
    """Expanding-window folds for rolling-origin cross-validation.

    The series is cut into k+1 chunks of equal size (the first chunk absorbs
    any remainder). Fold i trains on chunks 1..i and tests on chunk i+1, so
    train windows expand and the k test windows tile the series tail.
    """
    if k < 2:
        raise ParameterError(f"need k >= 2 folds, got {k}")
    n = len(series)
    if n < k + 1:
        raise InsufficientDataError(f"need at least {k + 1} points for {k} folds, got {n}")
    chunk = n // (k + 1)
    first = chunk + n % (k + 1)
    splits = []
    for i in range(1, k + 1):
        train_end = first + (i - 1) * chunk
        splits.append(SplitSpec(fold_index=i, train_end=train_end, test_end=train_end + chunk))
    return splits


def difference(values, lag: int = 1) -> np.ndarray:
    """Lagged difference: out[t] = in[t+lag] - in[t]."""
    x = np.asarray(values, dtype=float)
    if lag < 1:
        raise ParameterError(f"lag must be >= 1, got {lag}")
    if lag >= len(x):
        raise ParameterError(f"lag {lag} must be smaller than series length {len(x)}")
    return x[lag:] - x[:-lag]


def undifference(diffed, anchors, lag: int = 1) -> np.ndarray:
    """Invert `difference` given the first `lag` original values."""
    d = np.asarray(diffed, dtype=float)
    a = np.asarray(anchors, dtype=float)
    if lag < 1:
        raise ParameterError(f"lag must be >= 1, got {lag}")
    if len(a) != lag:
        raise ParameterError(f"need exactly {lag} anchor values, got {len(a)}")
    out = np.empty(len(d) + lag)
    out[:lag] = a
    for t in range(len(d)):
        out[lag + t] = d[t] + out[t]
    return out


def default_adf_max_lag(n: int) -> int:
    """Schwert's rule of thumb: 12 * (n/100)^(1/4)."""
    return int(math.floor(12 * (n / 100.0) ** 0.25))


def adf_stationarity(values, max_lag: int | None = None) -> StationarityReport:
    """Augmented Dickey-Fuller unit-root test with constant, no trend.

    Fits dy_t = c + g*y_{t-1} + sum_i d_i*dy_{t-i} + e with the lag order
    chosen by AIC over 0..max_lag (candidates compared on a common sample,
    the chosen order refit on the full usable sample). Reports the
    t-statistic of g against fixed large-sample critical values; the series
    is called stationary when the statistic falls below the 5% value.

    Raises:
        InsufficientDataError: fewer than 20 + max_lag observations.
        DegeneracyError: every candidate regression is singular.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if max_lag is None:
        max_lag = max(0, min(default_adf_max_lag(n), n - 21))
    if max_lag < 0:
        raise ParameterError(f"max_lag must be >= 0, got {max_lag}")
    if n < 20 + max_lag:
        raise InsufficientDataError(
            f"ADF needs at least {20 + max_lag} observations, got {n}"
        )
    dy = np.diff(y)

    def design(p: int, start: int) -> tuple[np.ndarray, np.ndarray]:
        rows = len(dy) - start
        cols = [np.ones(rows), y[start : n - 1]]
        for i in range(1, p + 1):
            cols.append(dy[start - i : len(dy) - i])
        return np.column_stack(cols), dy[start:]

    def ols(X: np.ndarray, yy: np.ndarray):
        beta, _, rank, _ = np.linalg.lstsq(X, yy, rcond=None)
        eps = yy - X @ beta
        return beta, float(eps @ eps), rank

    # lag selection on the common sample starting at max_lag
    best_p = None
    best_aic = np.inf
    for p in range(max_lag + 1):
        X, yy = design(p, max_lag)
        beta, sse, rank = ols(X, yy)
        if rank < X.shape[1]:
            continue  # collinear candidate (e.g. deterministic series)
        rows = len(yy)
        llf = -0.5 * rows * (np.log(2 * np.pi * max(sse / rows, 1e-300)) + 1)
        aic = 2 * (X.shape[1] + 1) - 2 * llf
        if aic < best_aic:
            best_aic, best_p = aic, p
    if best_p is None:
        raise DegeneracyError("ADF regression is singular at every lag order")

    X, yy = design(best_p, best_p)
    beta, sse, rank = ols(X, yy)
    if rank < X.shape[1]:
        raise DegeneracyError(f"ADF regression singular at selected lag {best_p}")
    rows, k = X.shape
    sigma2 = sse / (rows - k)
    gamma = float(beta[1])
    scale = float(yy @ yy) + 1.0
    if sigma2 <= 1e-14 * scale / rows:
        # perfect fit (deterministic series): the t-statistic degenerates to
        # the sign of gamma in the zero-noise limit
        if abs(gamma) <= 1e-12:
            stat = 0.0
        else:
            stat = -np.inf if gamma < 0 else np.inf
    else:
        xtx_inv = np.linalg.inv(X.T @ X)
        stat = gamma / float(np.sqrt(sigma2 * xtx_inv[1, 1]))
    verdict = (
        VERDICT_STATIONARY if stat < ADF_CRITICAL_VALUES["5%"] else VERDICT_NON_STATIONARY
    )
    return StationarityReport(
        test_statistic=float(stat),
        critical_values=dict(ADF_CRITICAL_VALUES),
        lags_used=best_p,
        verdict=verdict,
    )
