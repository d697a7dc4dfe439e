"""Price series ingestion, date alignment, weekly resampling and sample splits."""
from __future__ import annotations

import csv
import datetime as _dt
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from hmmstatarb.exceptions import DataError

FREQUENCIES = ("daily", "weekly")


def _as_dates(values) -> np.ndarray:
    return np.asarray(values, dtype="datetime64[D]")


def to_date(value) -> np.datetime64:
    """Coerce an ISO string, ``datetime.date`` or ``datetime64`` to ``datetime64[D]``."""
    if isinstance(value, np.datetime64):
        return value.astype("datetime64[D]")
    if isinstance(value, (_dt.date, _dt.datetime)):
        return np.datetime64(value.isoformat()[:10], "D")
    try:
        return np.datetime64(_dt.date.fromisoformat(str(value).strip()), "D")
    except ValueError as exc:
        raise DataError(f"unparsable date {value!r} (expected YYYY-MM-DD)") from exc


@dataclass(frozen=True)
class PriceSeries:
    """A named, strictly increasing sequence of positive prices."""

    name: str
    dates: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        dates = _as_dates(self.dates)
        prices = np.asarray(self.prices, dtype=float)
        if dates.ndim != 1 or prices.shape != dates.shape:
            raise DataError(f"{self.name}: dates and prices must be 1-d of equal length")
        if dates.size and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            dup = dates[1:][np.diff(dates) == np.timedelta64(0, "D")]
            if dup.size:
                raise DataError(f"{self.name}: duplicate date {dup[0]}")
            raise DataError(f"{self.name}: dates must be strictly increasing")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise DataError(f"{self.name}: prices must be finite and strictly positive")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "prices", prices)

    def __len__(self):
        return self.dates.size


@dataclass(frozen=True)
class PricePanel:
    """Several price series on one shared date index.

    ``values`` has shape ``(n_dates, n_series)``; column order follows ``names``.
    """

    names: tuple
    dates: np.ndarray
    values: np.ndarray
    frequency: str = "daily"

    def __post_init__(self):
        names = tuple(self.names)
        dates = _as_dates(self.dates)
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2 or values.shape != (dates.size, len(names)):
            raise DataError("panel values must have shape (len(dates), len(names))")
        if len(set(names)) != len(names):
            raise DataError(f"duplicate series names in panel: {names}")
        if self.frequency not in FREQUENCIES:
            raise DataError(f"unknown frequency {self.frequency!r}")
        if dates.size and np.any(np.diff(dates) <= np.timedelta64(0, "D")):
            raise DataError("panel dates must be strictly increasing")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.dates.size

    @property
    def k(self) -> int:
        return len(self.names)

    @property
    def series(self) -> list[PriceSeries]:
        return [PriceSeries(n, self.dates, self.values[:, i]) for i, n in enumerate(self.names)]

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.names.index(name)]

    def select(self, names: Sequence[str]) -> "PricePanel":
        idx = [self.names.index(n) for n in names]
        return PricePanel(tuple(names), self.dates, self.values[:, idx], self.frequency)

    def between(self, start=None, end=None) -> "PricePanel":
        """Rows with ``start <= date <= end`` (either bound optional)."""
        mask = np.ones(self.dates.size, dtype=bool)
        if start is not None:
            mask &= self.dates >= to_date(start)
        if end is not None:
            mask &= self.dates <= to_date(end)
        if not mask.any():
            raise DataError(f"no observations between {start} and {end}")
        return PricePanel(self.names, self.dates[mask], self.values[mask], self.frequency)


@dataclass(frozen=True)
class SampleSplit:
    t0: np.datetime64
    tB: np.datetime64
    T: np.datetime64

    def __post_init__(self):
        t0, tB, T = to_date(self.t0), to_date(self.tB), to_date(self.T)
        if not (t0 < tB <= T):
            raise DataError(f"sample split requires t0 < tB <= T, got {t0}, {tB}, {T}")
        object.__setattr__(self, "t0", t0)
        object.__setattr__(self, "tB", tB)
        object.__setattr__(self, "T", T)


def load_csv(path, date_column: str = "date", price_column: str = "price",
             name: str | None = None) -> PriceSeries:
    """Read one price series from a headed CSV file.

    A row whose date does not parse, or whose price is not a positive number, raises
    :class:`DataError` carrying the file line number.
    """
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc.strerror or exc}") from exc
    dates, prices = [], []
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: empty file")
        for col in (date_column, price_column):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: missing column {col!r} (have {reader.fieldnames})")
        for row in reader:
            line = reader.line_num
            raw_date, raw_price = row[date_column], row[price_column]
            try:
                d = to_date(raw_date)
            except DataError:
                raise DataError(f"{path}:{line}: unparsable date {raw_date!r}") from None
            try:
                p = float(raw_price)
            except (TypeError, ValueError):
                raise DataError(f"{path}:{line}: non-numeric price {raw_price!r}") from None
            if not math.isfinite(p) or p <= 0:
                raise DataError(f"{path}:{line}: price must be positive, got {raw_price!r}")
            if dates and d <= dates[-1]:
                kind = "duplicate" if d == dates[-1] else "out-of-order"
                raise DataError(f"{path}:{line}: {kind} date {raw_date}")
            dates.append(d)
            prices.append(p)
    if not dates:
        raise DataError(f"{path}: no observations")
    return PriceSeries(name or path.stem, np.array(dates), np.array(prices))


def align(series: Sequence[PriceSeries], frequency: str = "daily") -> PricePanel:
    """Restrict series to their common dates, keeping the input order."""
    if len(series) < 2:
        raise DataError("align needs at least two series")
    common = series[0].dates
    for s in series[1:]:
        common = np.intersect1d(common, s.dates, assume_unique=True)
    if common.size == 0:
        raise DataError("series share no common dates")
    cols = []
    for s in series:
        idx = np.searchsorted(s.dates, common)
        cols.append(s.prices[idx])
    return PricePanel(tuple(s.name for s in series), common, np.column_stack(cols), frequency)


def iso_week_keys(dates: np.ndarray) -> np.ndarray:
    """Integer key ``iso_year * 100 + iso_week`` per date."""
    # ISO week-year is the year of the Thursday of the same week
    days = dates.astype("datetime64[D]").astype(np.int64)
    weekday = (days + 3) % 7  # Monday = 0; 1970-01-01 was a Thursday
    thursday = days - weekday + 3
    th = thursday.astype("datetime64[D]")
    year = th.astype("datetime64[Y]").astype(np.int64) + 1970
    jan1 = th.astype("datetime64[Y]").astype("datetime64[D]").astype(np.int64)
    week = (thursday - jan1) // 7 + 1
    return year * 100 + week


def resample_weekly(panel: PricePanel) -> PricePanel:
    """Last available observation of each ISO week."""
    if panel.frequency != "daily":
        raise DataError("resample_weekly expects a daily panel")
    if len(panel) == 0:
        raise DataError("empty panel")
    keys = iso_week_keys(panel.dates)
    last = np.flatnonzero(np.r_[keys[1:] != keys[:-1], True])
    return PricePanel(panel.names, panel.dates[last], panel.values[last], "weekly")


def split(panel: PricePanel, tB) -> tuple[PricePanel, PricePanel]:
    """Training rows (date < tB) and test rows (date >= tB)."""
    tB = to_date(tB)
    if not (panel.dates[0] < tB <= panel.dates[-1]):
        raise DataError(f"split date {tB} must lie in ({panel.dates[0]}, {panel.dates[-1]}]")
    cut = int(np.searchsorted(panel.dates, tB, side="left"))
    train = PricePanel(panel.names, panel.dates[:cut], panel.values[:cut], panel.frequency)
    test = PricePanel(panel.names, panel.dates[cut:], panel.values[cut:], panel.frequency)
    return train, test


def write_series_csv(path, dates, columns: dict) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["date", *columns])
        for i, d in enumerate(dates):
            w.writerow([str(d), *(_fmt(columns[c][i]) for c in columns)])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v
