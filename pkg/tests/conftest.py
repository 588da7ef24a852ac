"""Shared fixtures and series builders."""

from datetime import date, timedelta

import numpy as np
import pytest

from cropcast.ingest import PriceSeries

START = date(2015, 1, 5)  # a Monday


def weekly_dates(n, start=START):
    return tuple(start + timedelta(weeks=i) for i in range(n))


def make_series(values, crop="TestCrop", start=START, year_range=None):
    values = np.asarray(values, dtype=float)
    dates = weekly_dates(len(values), start)
    if year_range is None:
        year_range = (dates[0].year, dates[-1].year)
    return PriceSeries(crop=crop, dates=dates, values=values, year_range=year_range)


@pytest.fixture
def series_factory():
    return make_series


@pytest.fixture
def rng():
    return np.random.default_rng(0)
