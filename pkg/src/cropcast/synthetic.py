"""Deterministic synthetic weekly price series for demos and tests.

The real 2012-2016 retail price extracts are not redistributable, so the
bundled demo data and the acceptance runs use seeded trend + seasonal +
noise series shaped like weekly crop prices.
"""

from __future__ import annotations

from datetime import date, timedelta

import numpy as np

from .ingest import PriceSeries

DEFAULT_START = date(2012, 1, 2)  # a Monday
DEFAULT_WEEKS = 260  # five years of weekly points


def make_weekly_series(
    crop: str,
    n_weeks: int = DEFAULT_WEEKS,
    start: date = DEFAULT_START,
    base: float = 25.0,
    trend_per_week: float = 0.02,
    seasonal_amplitude: float = 2.0,
    period: int = 52,
    noise_sd: float = 0.5,
    seed: int = 0,
) -> PriceSeries:
    """Seasonal + trend + noise series, strictly positive, weekly spaced."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_weeks)
    values = (
        base
        + trend_per_week * t
        + seasonal_amplitude * np.sin(2.0 * np.pi * t / period)
        + noise_sd * rng.standard_normal(n_weeks)
    )
    values = np.maximum(values, 0.5)  # keep strictly positive under heavy noise
    dates = tuple(start + timedelta(weeks=int(w)) for w in range(n_weeks))
    year_range = (dates[0].year, dates[-1].year)
    return PriceSeries(crop=crop, dates=dates, values=values, year_range=year_range)


# Bundled demo crops: rough price levels per kg so the numbers look like the
# commodity they stand in for. Seeds differ so the series are not clones.
DEMO_CROPS = {
    "Jowar": dict(base=27.0, trend_per_week=0.010, seasonal_amplitude=1.8, noise_sd=0.45, seed=11),
    "Rice": dict(base=31.0, trend_per_week=0.012, seasonal_amplitude=1.5, noise_sd=0.40, seed=12),
    "Maize": dict(base=22.0, trend_per_week=0.008, seasonal_amplitude=1.6, noise_sd=0.40, seed=13),
    "Urad": dict(base=95.0, trend_per_week=0.030, seasonal_amplitude=4.0, noise_sd=1.20, seed=14),
}


def make_demo_series(crop: str, n_weeks: int = DEFAULT_WEEKS) -> PriceSeries:
    params = DEMO_CROPS.get(crop)
    if params is None:
        return make_weekly_series(crop, n_weeks=n_weeks)
    return make_weekly_series(crop, n_weeks=n_weeks, **params)
