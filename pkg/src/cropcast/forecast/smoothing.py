"""Exponential smoothing families: SES, Holt, and Holt-Winters (add/mul).

All recurrences share one convention: the state is indexed at time 0 and the
update loop runs over t = 1..n-1, scoring one-step-ahead predictions as it
goes. Holt-Winters initializes its state from the first two seasons (a
deliberate look-ahead heuristic) but still updates from t = 1, which keeps
the reduction chain SES -> Holt -> Holt-Winters exact under pinned
parameters and zeroed extra state.

Smoothing parameters left unset are optimized by exhaustive search over a
0.01-step grid per parameter, minimizing in-sample one-step SSE; ties go to
the smallest (alpha, beta, gamma). The grid sweep is a numba kernel: the
joint Holt-Winters grid has 101^3 candidates.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..exceptions import InsufficientDataError, ParameterError, PositivityError
from ..ingest import PriceSeries
from .model import FittedModel, ForecastModelSpec, SMOOTHING_FAMILIES, with_params

PARAM_GRID = np.linspace(0.0, 1.0, 101)


@njit(cache=True, nogil=True)
def _ses_sse_grid(y, alphas, l0):
    out = np.empty(alphas.shape[0])
    for k in range(alphas.shape[0]):
        a = alphas[k]
        lev = l0
        sse = 0.0
        for t in range(1, y.shape[0]):
            e = y[t] - lev
            sse += e * e
            lev = a * y[t] + (1.0 - a) * lev
        out[k] = sse
    return out


@njit(cache=True, nogil=True)
def _holt_sse_grid(y, alphas, betas, l0, b0):
    out = np.empty(alphas.shape[0])
    for k in range(alphas.shape[0]):
        a = alphas[k]
        b = betas[k]
        lev = l0
        tr = b0
        sse = 0.0
        for t in range(1, y.shape[0]):
            pred = lev + tr
            e = y[t] - pred
            sse += e * e
            lev_new = a * y[t] + (1.0 - a) * (lev + tr)
            tr = b * (lev_new - lev) + (1.0 - b) * tr
            lev = lev_new
        out[k] = sse
    return out


@njit(cache=True, nogil=True)
def _hw_sse_grid(y, m, alphas, betas, gammas, l0, b0, s0, multiplicative):
    out = np.empty(alphas.shape[0])
    seas = np.empty(m)
    for k in range(alphas.shape[0]):
        a = alphas[k]
        b = betas[k]
        g = gammas[k]
        lev = l0
        tr = b0
        for i in range(m):
            seas[i] = s0[i]
        sse = 0.0
        for t in range(1, y.shape[0]):
            ph = t % m
            if multiplicative:
                if abs(seas[ph]) < 1e-12:
                    sse = np.inf
                    break
                pred = (lev + tr) * seas[ph]
                e = y[t] - pred
                sse += e * e
                lev_new = a * (y[t] / seas[ph]) + (1.0 - a) * (lev + tr)
                if abs(lev_new) < 1e-12:
                    sse = np.inf
                    break
                tr = b * (lev_new - lev) + (1.0 - b) * tr
                seas[ph] = g * (y[t] / lev_new) + (1.0 - g) * seas[ph]
                lev = lev_new
            else:
                pred = lev + tr + seas[ph]
                e = y[t] - pred
                sse += e * e
                lev_new = a * (y[t] - seas[ph]) + (1.0 - a) * (lev + tr)
                tr = b * (lev_new - lev) + (1.0 - b) * tr
                seas[ph] = g * (y[t] - lev_new) + (1.0 - g) * seas[ph]
                lev = lev_new
        out[k] = sse
    return out


def _run_ses(y: np.ndarray, alpha: float, l0: float) -> tuple[float, float]:
    lev = l0
    sse = 0.0
    for t in range(1, len(y)):
        e = y[t] - lev
        sse += e * e
        lev = alpha * y[t] + (1.0 - alpha) * lev
    return lev, sse


def _run_holt(y, alpha, beta, l0, b0):
    lev, tr = l0, b0
    sse = 0.0
    for t in range(1, len(y)):
        e = y[t] - (lev + tr)
        sse += e * e
        lev_new = alpha * y[t] + (1.0 - alpha) * (lev + tr)
        tr = beta * (lev_new - lev) + (1.0 - beta) * tr
        lev = lev_new
    return lev, tr, sse


def _run_hw(y, m, alpha, beta, gamma, l0, b0, s0, multiplicative):
    lev, tr = l0, b0
    seas = list(s0)
    sse = 0.0
    for t in range(1, len(y)):
        ph = t % m
        if multiplicative:
            pred = (lev + tr) * seas[ph]
            e = y[t] - pred
            sse += e * e
            lev_new = alpha * (y[t] / seas[ph]) + (1.0 - alpha) * (lev + tr)
            tr = beta * (lev_new - lev) + (1.0 - beta) * tr
            seas[ph] = gamma * (y[t] / lev_new) + (1.0 - gamma) * seas[ph]
            lev = lev_new
        else:
            pred = lev + tr + seas[ph]
            e = y[t] - pred
            sse += e * e
            lev_new = alpha * (y[t] - seas[ph]) + (1.0 - alpha) * (lev + tr)
            tr = beta * (lev_new - lev) + (1.0 - beta) * tr
            seas[ph] = gamma * (y[t] - lev_new) + (1.0 - gamma) * seas[ph]
            lev = lev_new
    return lev, tr, seas, sse


def _grid_for(value: float | None) -> np.ndarray:
    return PARAM_GRID if value is None else np.array([float(value)])


def _hw_initial_state(spec: ForecastModelSpec, y: np.ndarray, m: int, multiplicative: bool):
    season1 = y[:m]
    season2 = y[m : 2 * m]
    l0 = float(season1.mean()) if spec.initial_level is None else spec.initial_level
    b0 = (
        float((season2.mean() - season1.mean()) / m)
        if spec.initial_trend is None
        else spec.initial_trend
    )
    if spec.initial_seasonals is not None:
        s0 = np.asarray(spec.initial_seasonals, dtype=float)
        if multiplicative and np.any(s0 <= 0):
            raise PositivityError("multiplicative initial seasonals must be positive")
    elif multiplicative:
        s0 = season1 / season1.mean()
    else:
        s0 = season1 - season1.mean()
    return l0, b0, s0


def fit_smoothing(spec: ForecastModelSpec, train: PriceSeries) -> FittedModel:
    """Fit SES, Holt, or Holt-Winters, optimizing any unset parameters."""
    if spec.family not in SMOOTHING_FAMILIES:
        raise ParameterError(f"not a smoothing family: {spec.family!r}")
    y = np.asarray(train.values, dtype=float)
    n = len(y)
    if n < 2:
        raise InsufficientDataError(f"smoothing fit needs >= 2 points, got {n}")

    if spec.family == "ses":
        l0 = y[0] if spec.initial_level is None else spec.initial_level
        alphas = _grid_for(spec.alpha)
        sse = _ses_sse_grid(y, alphas, l0)
        alpha = float(alphas[int(np.argmin(sse))])
        level, final_sse = _run_ses(y, alpha, l0)
        fitted_spec = with_params(spec, alpha=alpha)
        state = {"level": level}
    elif spec.family == "holt":
        l0 = y[0] if spec.initial_level is None else spec.initial_level
        b0 = float(y[1] - y[0]) if spec.initial_trend is None else spec.initial_trend
        ag, bg = _grid_for(spec.alpha), _grid_for(spec.beta)
        A, B = np.meshgrid(ag, bg, indexing="ij")
        sse = _holt_sse_grid(y, A.ravel(), B.ravel(), l0, b0)
        i = int(np.argmin(sse))
        alpha, beta = float(A.ravel()[i]), float(B.ravel()[i])
        level, trend, final_sse = _run_holt(y, alpha, beta, l0, b0)
        fitted_spec = with_params(spec, alpha=alpha, beta=beta)
        state = {"level": level, "trend": trend}
    else:
        multiplicative = spec.family == "holt_winters_multiplicative"
        m = spec.seasonal_period
        if n < 2 * m:
            raise InsufficientDataError(
                f"{spec.family} needs >= {2 * m} points for period {m}, got {n}"
            )
        l0, b0, s0 = _hw_initial_state(spec, y, m, multiplicative)
        ag, bg, gg = _grid_for(spec.alpha), _grid_for(spec.beta), _grid_for(spec.gamma)
        A, B, G = np.meshgrid(ag, bg, gg, indexing="ij")
        sse = _hw_sse_grid(
            y, m, A.ravel(), B.ravel(), G.ravel(), l0, b0,
            np.asarray(s0, dtype=float), multiplicative,
        )
        i = int(np.argmin(sse))
        if not np.isfinite(sse[i]):
            raise ParameterError(
                f"{spec.family} recursion degenerated for every parameter choice"
            )
        alpha, beta, gamma = float(A.ravel()[i]), float(B.ravel()[i]), float(G.ravel()[i])
        level, trend, seasonals, final_sse = _run_hw(
            y, m, alpha, beta, gamma, l0, b0, s0, multiplicative
        )
        fitted_spec = with_params(spec, alpha=alpha, beta=beta, gamma=gamma)
        state = {
            "level": level,
            "trend": trend,
            "seasonals": [float(s) for s in seasonals],
            "phase": n % m,
        }

    return FittedModel(
        spec=fitted_spec,
        crop=train.crop,
        last_train_date=train.last_date,
        train_length=n,
        state=state,
        train_sse=float(final_sse),
    )


def forecast_values(model: FittedModel, horizon: int) -> np.ndarray:
    family = model.spec.family
    state = model.state
    h = np.arange(1, horizon + 1, dtype=float)
    if family == "ses":
        return np.full(horizon, state["level"])
    if family == "holt":
        return state["level"] + h * state["trend"]
    if family in ("holt_winters_additive", "holt_winters_multiplicative"):
        m = model.spec.seasonal_period
        seas = np.asarray(state["seasonals"], dtype=float)
        idx = (state["phase"] + np.arange(horizon)) % m
        base = state["level"] + h * state["trend"]
        if family == "holt_winters_additive":
            return base + seas[idx]
        return base * seas[idx]
    raise ParameterError(f"not a smoothing family: {family!r}")
