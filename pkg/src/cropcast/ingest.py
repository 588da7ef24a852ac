"""Raw price export parsing, weekly aggregation, and series construction.

Raw exports are comma-separated text with one row per (region, week) price
quote. They are reduced to one summary row per crop per week, then to a
gap-free weekly mean-price series that the forecasting models consume.
"""

from __future__ import annotations

import csv
import io
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from typing import Iterable, Mapping, Sequence

import numpy as np

from .exceptions import EmptySeriesError, ParameterError, PositivityError, SchemaError

RAW_DATE_FORMAT = "%d-%m-%Y"

# Cells treated as "no price reported". Anything else that fails to parse as a
# number is treated the same way and counted.
ABSENT_PRICE_SENTINELS = frozenset({"", "NA", "NR", "-"})

COLUMN_ROLES = frozenset({"region", "date", "commodity", "variety", "unit", "price"})
REQUIRED_ROLES = frozenset({"region", "date", "price"})

GAP_INTERPOLATE = "interpolate"
GAP_DROP_LEADING_TRAILING = "drop_leading_trailing"


@dataclass(frozen=True)
class RawPriceRecord:
    """One price quote from one region for one week.

    ``retail_price`` is None when the source cell was empty or unparseable;
    absent prices are never encoded as 0. ``commodity`` is None when the
    export has no commodity column (single-crop exports).
    """

    region: str
    week_date: date
    commodity: str | None = None
    variety: str | None = None
    unit: str | None = None
    retail_price: float | None = None


@dataclass(frozen=True)
class ParseResult:
    """Outcome of parsing one raw export."""

    records: tuple[RawPriceRecord, ...]
    skipped_rows: tuple[tuple[int, str], ...] = ()
    absent_prices: int = 0

    @property
    def skip_count(self) -> int:
        return len(self.skipped_rows)


@dataclass(frozen=True)
class WeeklyPriceSummary:
    """Per-week price statistics across all reporting regions."""

    week_date: date
    max_price: float
    min_price: float
    modal_price: float
    median_price: float
    mean_price: float
    region_count: int

    def __post_init__(self) -> None:
        if self.region_count < 1:
            raise ParameterError("region_count must be >= 1")
        if not (self.min_price <= self.median_price <= self.max_price):
            raise ParameterError("median must lie within [min, max]")
        if not (self.min_price <= self.mean_price <= self.max_price):
            raise ParameterError("mean must lie within [min, max]")


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Weekly mean-price series for one crop.

    Dates are strictly increasing and exactly 7 days apart; prices are
    strictly positive (required downstream by multiplicative Holt-Winters).
    """

    crop: str
    dates: tuple[date, ...]
    values: np.ndarray
    year_range: tuple[int, int]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if len(self.dates) != len(values):
            raise ParameterError("dates and values must have equal length")
        if len(self.dates) == 0:
            raise EmptySeriesError(f"series for {self.crop!r} is empty")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if (cur - prev).days != 7:
                raise SchemaError(
                    f"series dates must be weekly: {prev} -> {cur} is not 7 days"
                )
        if not np.all(values > 0):
            bad = self.dates[int(np.argmin(values > 0))]
            raise PositivityError(f"nonpositive price at {bad} in series {self.crop!r}")
        start, end = self.year_range
        if start > end:
            raise ParameterError(f"year_range start {start} > end {end}")

    def __len__(self) -> int:
        return len(self.dates)

    @property
    def points(self) -> tuple[tuple[date, float], ...]:
        return tuple(zip(self.dates, (float(v) for v in self.values)))

    @property
    def last_date(self) -> date:
        return self.dates[-1]

    def slice(self, start: int, stop: int) -> "PriceSeries":
        """Contiguous index slice as a new series (year_range inherited)."""
        if not (0 <= start < stop <= len(self)):
            raise ParameterError(f"invalid slice [{start}, {stop}) for length {len(self)}")
        return PriceSeries(
            crop=self.crop,
            dates=self.dates[start:stop],
            values=self.values[start:stop].copy(),
            year_range=self.year_range,
        )


def parse_raw_csv(
    text: str | Iterable[str], column_map: Mapping[str, str]
) -> ParseResult:
    """Parse a raw multi-region price export.

    Args:
        text: CSV content (string or line iterable) with a header row.
        column_map: maps a header column name to its role, one of
            region/date/commodity/variety/unit/price. region, date and price
            are required; the rest are optional.

    Returns:
        ParseResult with one record per parseable row (order preserved),
        the rows skipped for malformed dates, and the count of absent prices.

    Raises:
        SchemaError: a mapped column is missing from the header, a required
            role is unmapped, or a role is mapped twice.
    """
    for col, role in column_map.items():
        if role not in COLUMN_ROLES:
            raise SchemaError(f"unknown column role {role!r} for column {col!r}")
    roles = {role: col for col, role in column_map.items()}
    if len(roles) != len(column_map):
        counts = Counter(column_map.values())
        dup = next(r for r, c in counts.items() if c > 1)
        raise SchemaError(f"role {dup!r} is mapped to more than one column")
    missing_roles = REQUIRED_ROLES - roles.keys()
    if missing_roles:
        raise SchemaError(f"column_map missing required roles: {sorted(missing_roles)}")

    if isinstance(text, str):
        reader = csv.reader(io.StringIO(text))
    else:
        reader = csv.reader(text)

    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("input has no header row") from None
    header = [h.strip() for h in header]
    index: dict[str, int] = {}
    for col in column_map:
        if col not in header:
            raise SchemaError(f"mapped column {col!r} not found in header {header}")
        index[col] = header.index(col)

    def cell(row: Sequence[str], role: str) -> str | None:
        col = roles.get(role)
        if col is None:
            return None
        i = index[col]
        return row[i].strip() if i < len(row) else ""

    records: list[RawPriceRecord] = []
    skipped: list[tuple[int, str]] = []
    absent = 0
    for row in reader:
        if not any(c.strip() for c in row):
            continue
        line = reader.line_num
        raw_date = cell(row, "date") or ""
        try:
            week_date = datetime.strptime(raw_date, RAW_DATE_FORMAT).date()
        except ValueError:
            skipped.append((line, f"malformed date {raw_date!r}"))
            continue
        raw_price = cell(row, "price")
        price: float | None
        if raw_price is None or raw_price in ABSENT_PRICE_SENTINELS:
            price = None
        else:
            try:
                price = float(raw_price)
            except ValueError:
                price = None
        if price is not None and price < 0:
            price = None
        if price is None:
            absent += 1
        records.append(
            RawPriceRecord(
                region=cell(row, "region") or "",
                week_date=week_date,
                commodity=cell(row, "commodity"),
                variety=cell(row, "variety"),
                unit=cell(row, "unit"),
                retail_price=price,
            )
        )
    return ParseResult(tuple(records), tuple(skipped), absent)


def _mode(prices: Sequence[float]) -> float:
    # most frequent value; ties broken by the smallest tied value
    counts = Counter(prices)
    best_count = max(counts.values())
    return min(p for p, c in counts.items() if c == best_count)


def aggregate_weekly(
    records: Iterable[RawPriceRecord], crop: str
) -> list[WeeklyPriceSummary]:
    """Reduce raw records to one summary row per week for one crop.

    Records whose commodity is None (single-crop exports) match any crop.
    Absent prices are excluded from the statistics; a week where every price
    is absent yields no summary row.

    Raises:
        EmptySeriesError: no record with a present price matches the crop.
    """
    by_week: dict[date, list[float]] = defaultdict(list)
    for rec in records:
        if rec.commodity is not None and rec.commodity != crop:
            continue
        if rec.retail_price is None:
            continue
        by_week[rec.week_date].append(rec.retail_price)
    if not by_week:
        raise EmptySeriesError(f"no priced records for crop {crop!r}")
    summaries = []
    for week in sorted(by_week):
        prices = by_week[week]
        lo, hi = min(prices), max(prices)
        # fmean/median can drift a ulp outside [lo, hi]; pin them back
        clamp = lambda v: min(max(v, lo), hi)  # noqa: E731
        summaries.append(
            WeeklyPriceSummary(
                week_date=week,
                max_price=hi,
                min_price=lo,
                modal_price=_mode(prices),
                median_price=clamp(float(statistics.median(prices))),
                mean_price=clamp(float(statistics.fmean(prices))),
                region_count=len(prices),
            )
        )
    return summaries


def build_price_series(
    summaries: Sequence[WeeklyPriceSummary],
    crop: str,
    year_range: tuple[int, int],
    gap_policy: str = GAP_INTERPOLATE,
) -> PriceSeries:
    """Assemble the weekly mean-price series for one crop.

    Keeps only weeks whose year falls inside ``year_range`` (inclusive) and
    repairs interior gaps so the output is exactly 7 days apart throughout.
    Under ``interpolate`` a missing week gets the linear interpolation of its
    nearest present neighbors; under ``drop_leading_trailing`` no filling is
    done and an interior gap is an error. Leading/trailing gaps never appear:
    the series starts and ends on observed weeks.

    Raises:
        EmptySeriesError: no summary falls within the year range.
        PositivityError: a kept or interpolated price is not strictly positive.
        SchemaError: duplicate weeks, or weeks not on a 7-day grid.
        ParameterError: bad year_range or gap policy, or interior gaps under
            ``drop_leading_trailing``.
    """
    if gap_policy not in (GAP_INTERPOLATE, GAP_DROP_LEADING_TRAILING):
        raise ParameterError(f"unknown gap_policy {gap_policy!r}")
    start_year, end_year = year_range
    if start_year > end_year:
        raise ParameterError(f"year_range start {start_year} > end {end_year}")

    kept = sorted(
        (s for s in summaries if start_year <= s.week_date.year <= end_year),
        key=lambda s: s.week_date,
    )
    if not kept:
        raise EmptySeriesError(
            f"no weeks for crop {crop!r} within years {start_year}-{end_year}"
        )

    anchor = kept[0].week_date
    offsets: list[int] = []
    seen: set[int] = set()
    for s in kept:
        days = (s.week_date - anchor).days
        if days % 7 != 0:
            raise SchemaError(
                f"week {s.week_date} is not on the 7-day grid anchored at {anchor}"
            )
        w = days // 7
        if w in seen:
            raise SchemaError(f"duplicate week {s.week_date} for crop {crop!r}")
        seen.add(w)
        offsets.append(w)

    n_weeks = offsets[-1] + 1
    grid = np.full(n_weeks, np.nan)
    for w, s in zip(offsets, kept):
        grid[w] = s.mean_price

    missing = np.isnan(grid)
    if missing.any():
        if gap_policy == GAP_DROP_LEADING_TRAILING:
            raise ParameterError(
                f"series for {crop!r} has interior gaps; "
                f"gap_policy={GAP_DROP_LEADING_TRAILING!r} cannot repair them"
            )
        present = np.flatnonzero(~missing)
        grid = np.interp(np.arange(n_weeks), present, grid[present])

    if not np.all(grid > 0):
        bad = anchor + timedelta(weeks=int(np.argmax(grid <= 0)))
        raise PositivityError(f"nonpositive mean price at {bad} for crop {crop!r}")

    dates = tuple(anchor + timedelta(weeks=w) for w in range(n_weeks))
    return PriceSeries(crop=crop, dates=dates, values=grid, year_range=year_range)


def write_series_csv(series: PriceSeries, path) -> None:
    """Write the canonical per-crop series file (week_date,mean_price)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["week_date", "mean_price"])
        for d, v in series.points:
            writer.writerow([d.isoformat(), f"{v:.6f}".rstrip("0").rstrip(".")])


def read_series_csv(path, crop: str, year_range: tuple[int, int] | None = None) -> PriceSeries:
    """Read a canonical per-crop series file written by write_series_csv."""
    dates: list[date] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["week_date", "mean_price"]:
            raise SchemaError(f"{path}: expected header 'week_date,mean_price'")
        for row in reader:
            if not row or not any(c.strip() for c in row):
                continue
            dates.append(date.fromisoformat(row[0].strip()))
            values.append(float(row[1]))
    if not dates:
        raise EmptySeriesError(f"{path}: no data rows")
    if year_range is None:
        year_range = (dates[0].year, dates[-1].year)
    return PriceSeries(
        crop=crop, dates=tuple(dates), values=np.array(values), year_range=year_range
    )
