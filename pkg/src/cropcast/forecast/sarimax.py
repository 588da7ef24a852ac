"""Seasonal ARIMA with optional exogenous regressors, fit by conditional SSE.

Estimation minimizes the conditional sum of squares of the ARMA recursion on
the differenced series, with presample values taken as zero so that every
order produces exactly n_eff = (post-differencing length) residuals. That
keeps AIC/BIC comparable across a candidate grid. The optimizer is
Nelder-Mead from an all-zero start (iteration cap 2000, tolerance 1e-8),
which is deterministic. CSS is known to be slightly biased versus exact
maximum likelihood in small samples; at the series lengths used here the
difference is immaterial.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from ..exceptions import (
    ConvergenceError,
    InsufficientDataError,
    NoViableOrderError,
    ParameterError,
)
from ..ingest import PriceSeries
from .model import FittedModel, ForecastModelSpec, SarimaxOrder

NM_MAX_ITER = 2000
NM_TOL = 1e-8
ROOT_TOL = 1e-6


def information_criteria(log_likelihood: float, k: int, n: int) -> tuple[float, float]:
    """AIC and BIC from a log-likelihood, parameter count, and sample size."""
    if k < 1:
        raise ParameterError(f"parameter count must be >= 1, got {k}")
    if n < 1:
        raise ParameterError(f"sample size must be >= 1, got {n}")
    aic = 2.0 * k - 2.0 * log_likelihood
    bic = k * math.log(n) - 2.0 * log_likelihood
    return aic, bic


@dataclass(frozen=True)
class OrderGrid:
    """Candidate ranges for each order component, with a fixed seasonal period."""

    p: tuple[int, ...]
    d: tuple[int, ...]
    q: tuple[int, ...]
    P: tuple[int, ...] = (0,)
    D: tuple[int, ...] = (0,)
    Q: tuple[int, ...] = (0,)
    s: int = 0

    def __post_init__(self) -> None:
        for name in ("p", "d", "q", "P", "D", "Q"):
            vals = getattr(self, name)
            if not vals:
                raise ParameterError(f"grid range for {name} is empty")
            if any(v < 0 for v in vals):
                raise ParameterError(f"grid range for {name} has negative entries")
        if self.s == 0 and any(
            v != 0 for v in (*self.P, *self.D, *self.Q)
        ):
            raise ParameterError("seasonal grid ranges require s > 0")

    def candidates(self) -> list[SarimaxOrder]:
        """All orders in lexicographic (p,d,q,P,D,Q) enumeration order."""
        return [
            SarimaxOrder(p, d, q, P, D, Q, self.s)
            for p, d, q, P, D, Q in itertools.product(
                self.p, self.d, self.q, self.P, self.D, self.Q
            )
        ]

    @classmethod
    def from_dict(cls, doc: dict) -> "OrderGrid":
        kwargs = {k: tuple(v) if isinstance(v, (list, tuple)) else v for k, v in doc.items()}
        return cls(**kwargs)


def _expand_poly(coeffs: np.ndarray, seasonal: np.ndarray, s: int, sign: float) -> np.ndarray:
    """Product polynomial [1, sign*c1, ...] x [1, ..., sign*C1 at lag s, ...]."""
    p1 = np.concatenate(([1.0], sign * coeffs)) if len(coeffs) else np.array([1.0])
    if len(seasonal):
        p2 = np.zeros(s * len(seasonal) + 1)
        p2[0] = 1.0
        for i, c in enumerate(seasonal):
            p2[s * (i + 1)] = sign * c
    else:
        p2 = np.array([1.0])
    return np.convolve(p1, p2)


def _css_residuals(z: np.ndarray, ar_poly: np.ndarray, ma_poly: np.ndarray) -> np.ndarray:
    # zero presample on both filters: exactly n residuals come out
    zt = lfilter(ar_poly, [1.0], z)
    return lfilter([1.0], ma_poly, zt)


def _difference_stages(y: np.ndarray, d: int, D: int, s: int):
    """Apply d nonseasonal then D seasonal differences, keeping inversion tails."""
    w = np.asarray(y, dtype=float)
    inversion = []
    for _ in range(d):
        inversion.append({"lag": 1, "tail": [float(w[-1])]})
        w = w[1:] - w[:-1]
    for _ in range(D):
        inversion.append({"lag": s, "tail": [float(v) for v in w[-s:]]})
        w = w[s:] - w[:-s]
    inversion.reverse()  # invert seasonal first, then nonseasonal
    return w, inversion


def _integrate(forecast: np.ndarray, inversion: list[dict]) -> np.ndarray:
    out = np.asarray(forecast, dtype=float)
    for stage in inversion:
        lag = stage["lag"]
        buf = list(stage["tail"])
        vals = []
        for i, f in enumerate(out):
            v = f + buf[i]
            buf.append(v)
            vals.append(v)
        out = np.asarray(vals)
    return out


def _difference_matrix(x: np.ndarray, d: int, D: int, s: int) -> np.ndarray:
    w = np.asarray(x, dtype=float)
    for _ in range(d):
        w = w[1:] - w[:-1]
    for _ in range(D):
        w = w[s:] - w[:-s]
    return w


def fit_sarimax(
    order: SarimaxOrder,
    train: PriceSeries,
    exog: np.ndarray | None = None,
    with_constant: bool = False,
    family: str = "sarimax",
) -> FittedModel:
    """Estimate a (p,d,q)(P,D,Q,s) model by conditional sum of squares.

    Exogenous regressors enter as a regression term that is differenced
    together with the series. Non-invertible or explosive fitted polynomials
    set a warning on the result but forecasts are still produced.

    Raises:
        InsufficientDataError: train shorter than the order requires.
        ConvergenceError: the optimizer hit its iteration cap.
    """
    y = np.asarray(train.values, dtype=float)
    n = len(y)
    p, d, q, P, D, Q, s = order.p, order.d, order.q, order.P, order.D, order.Q, order.s
    min_len = d + s * D + max(p, q, s * P, s * Q) + 1
    if n <= min_len:
        raise InsufficientDataError(
            f"order {order.label()} needs more than {min_len} points, got {n}"
        )
    if exog is not None:
        exog = np.asarray(exog, dtype=float)
        if exog.ndim == 1:
            exog = exog.reshape(-1, 1)
        if exog.shape[0] != n:
            raise ParameterError(
                f"exog has {exog.shape[0]} rows for a train of length {n}"
            )

    w, inversion = _difference_stages(y, d, D, s)
    n_eff = len(w)
    wx = _difference_matrix(exog, d, D, s) if exog is not None else None
    n_exog = 0 if wx is None else wx.shape[1]
    n_params = p + q + P + Q + n_exog + int(with_constant)

    def unpack(x: np.ndarray):
        i = 0
        ar = x[i : i + p]; i += p
        ma = x[i : i + q]; i += q
        sar = x[i : i + P]; i += P
        sma = x[i : i + Q]; i += Q
        beta = x[i : i + n_exog]; i += n_exog
        const = float(x[i]) if with_constant else 0.0
        return ar, ma, sar, sma, beta, const

    def resid(x: np.ndarray) -> np.ndarray:
        ar, ma, sar, sma, beta, const = unpack(x)
        z = w - const
        if wx is not None:
            z = z - wx @ beta
        ar_poly = _expand_poly(ar, sar, s, -1.0)
        ma_poly = _expand_poly(ma, sma, s, +1.0)
        return _css_residuals(z, ar_poly, ma_poly)

    if n_params == 0:
        x_hat = np.zeros(0)
    else:
        def objective(x: np.ndarray) -> float:
            eps = resid(x)
            return 0.5 * math.log(max(float(eps @ eps) / n_eff, 1e-300))

        result = minimize(
            objective,
            np.zeros(n_params),
            method="Nelder-Mead",
            options=dict(
                maxiter=NM_MAX_ITER,
                maxfev=NM_MAX_ITER * (n_params + 1),
                xatol=NM_TOL,
                fatol=NM_TOL,
            ),
        )
        if not result.success:
            raise ConvergenceError(
                f"CSS optimization did not converge for order {order.label()}"
            )
        x_hat = result.x

    eps = resid(x_hat)
    sse = float(eps @ eps)
    sigma2 = max(sse / n_eff, 1e-300)
    llf = -0.5 * n_eff * (math.log(2.0 * math.pi * sigma2) + 1.0)
    aic, bic = information_criteria(llf, n_params + 1, n_eff)

    ar, ma, sar, sma, beta, const = unpack(x_hat)
    ar_poly = _expand_poly(ar, sar, s, -1.0)
    ma_poly = _expand_poly(ma, sma, s, +1.0)
    warnings = []
    for poly, label in ((ar_poly, "AR"), (ma_poly, "MA")):
        if len(poly) > 1:
            roots = np.roots(poly[::-1])
            if len(roots) and np.min(np.abs(roots)) <= 1.0 + ROOT_TOL:
                kind = "non-stationary" if label == "AR" else "non-invertible"
                warnings.append(f"{kind} {label} polynomial (root on/inside unit circle)")

    z = w - const
    if wx is not None:
        z = z - wx @ beta
    p_eff = len(ar_poly) - 1
    q_eff = len(ma_poly) - 1

    def tail(values: np.ndarray, length: int) -> list[float]:
        if length == 0:
            return []
        padded = np.concatenate((np.zeros(max(0, length - len(values))), values[-length:]))
        return [float(v) for v in padded]

    state = {
        "ar": [float(v) for v in ar],
        "ma": [float(v) for v in ma],
        "sar": [float(v) for v in sar],
        "sma": [float(v) for v in sma],
        "const": const,
        "exog_coef": [float(v) for v in beta],
        "z_tail": tail(z, p_eff),
        "eps_tail": tail(eps, q_eff),
        "integration": inversion,
        "exog_raw_tail": (
            [[float(v) for v in row] for row in exog[-(d + s * D):]]
            if exog is not None and (d + s * D) > 0
            else []
        ),
        "n_exog": n_exog,
    }

    spec = ForecastModelSpec(
        family=family, order=order, with_constant=with_constant
    )
    return FittedModel(
        spec=spec,
        crop=train.crop,
        last_train_date=train.last_date,
        train_length=n,
        state=state,
        train_sse=sse,
        log_likelihood=llf,
        aic=aic,
        bic=bic,
        warnings=tuple(warnings),
    )


def forecast_values(
    model: FittedModel, horizon: int, future_exog: np.ndarray | None = None
) -> np.ndarray:
    """Recursive-substitution forecasts, re-integrated through the differences."""
    state = model.state
    order = model.spec.order
    s = order.s
    n_exog = state["n_exog"]
    if n_exog and future_exog is None:
        raise ParameterError(
            f"model was fit with {n_exog} exogenous columns; "
            f"future_exog is required to forecast"
        )
    fx = None
    if n_exog:
        fx = np.asarray(future_exog, dtype=float)
        if fx.ndim == 1:
            fx = fx.reshape(-1, 1)
        if fx.shape != (horizon, n_exog):
            raise ParameterError(
                f"future_exog must have shape ({horizon}, {n_exog}), got {fx.shape}"
            )
        raw_tail = np.asarray(state["exog_raw_tail"], dtype=float)
        if len(raw_tail):
            joined = np.vstack([raw_tail, fx])
            fx = _difference_matrix(joined, order.d, order.D, s)

    ar_poly = _expand_poly(
        np.asarray(state["ar"]), np.asarray(state["sar"]), s, -1.0
    )
    ma_poly = _expand_poly(
        np.asarray(state["ma"]), np.asarray(state["sma"]), s, +1.0
    )
    p_eff = len(ar_poly) - 1
    q_eff = len(ma_poly) - 1
    zhist = list(state["z_tail"])
    ehist = list(state["eps_tail"])
    const = state["const"]
    beta = np.asarray(state["exog_coef"], dtype=float)

    w_fc = np.empty(horizon)
    for h in range(horizon):
        zt = 0.0
        for i in range(1, p_eff + 1):
            zt -= ar_poly[i] * zhist[-i]
        for j in range(1, q_eff + 1):
            zt += ma_poly[j] * ehist[-j]
        if p_eff:
            zhist.append(zt)
        if q_eff:
            ehist.append(0.0)
        w_fc[h] = zt + const + (float(fx[h] @ beta) if n_exog else 0.0)

    return _integrate(w_fc, state["integration"])


def select_order(
    train: PriceSeries,
    grid: OrderGrid,
    criterion: str = "aic",
    exog: np.ndarray | None = None,
    with_constant: bool = False,
) -> SarimaxOrder:
    """Pick the grid candidate minimizing AIC or BIC.

    Candidates whose fit raises are skipped. Ties break toward the smaller
    parameter count, then the lexicographically earlier (p,d,q,P,D,Q); the
    result is therefore independent of evaluation order.
    """
    if criterion not in ("aic", "bic"):
        raise ParameterError(f"criterion must be 'aic' or 'bic', got {criterion!r}")
    best = None
    for idx, order in enumerate(grid.candidates()):
        try:
            fitted = fit_sarimax(order, train, exog=exog, with_constant=with_constant)
        except (InsufficientDataError, ConvergenceError, ParameterError):
            continue
        value = fitted.aic if criterion == "aic" else fitted.bic
        key = (value, order.n_params + int(with_constant), idx)
        if best is None or key < best[0]:
            best = (key, order)
    if best is None:
        raise NoViableOrderError(
            f"no candidate in the {criterion} grid produced a successful fit"
        )
    return best[1]
