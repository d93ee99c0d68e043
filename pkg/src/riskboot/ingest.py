"""CSV ingestion, log returns and moment summaries for daily price series.

Input files are plain CSV with a header row. The caller names the date
column and either a price column or a pre-computed return column; dates are
parsed with a configurable strptime format. Loading is strict: every problem
in the file is collected and reported at once rather than failing on the
first bad row.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date, datetime

import numpy as np


class IngestError(ValueError):
    """Malformed input. Carries every problem found, not just the first."""

    def __init__(self, path, problems):
        self.path = str(path)
        self.problems = list(problems)
        listing = "\n".join(f"  - {p}" for p in self.problems)
        super().__init__(f"{self.path}: {len(self.problems)} problem(s)\n{listing}")


# ----------------------------------------------------------------------
# series containers
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class PriceSeries:
    """Settlement prices on strictly increasing trading dates.

    Prices must be positive and finite and there must be at least two of
    them, since a lone price yields no return.
    """

    label: str
    dates: tuple[date, ...]
    prices: np.ndarray

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        object.__setattr__(self, "dates", tuple(self.dates))
        if prices.size < 2:
            raise ValueError(f"{self.label or 'price series'}: need at least 2 prices, got {prices.size}")
        if len(self.dates) != prices.size:
            raise ValueError("dates and prices have different lengths")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
            raise ValueError("prices must be positive and finite")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    @property
    def n(self) -> int:
        return self.prices.size


@dataclass(frozen=True)
class ReturnSeries:
    """Daily log returns, one per date, in date order."""

    label: str
    dates: tuple[date, ...]
    returns: np.ndarray

    def __post_init__(self):
        returns = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "dates", tuple(self.dates))
        if returns.size < 1:
            raise ValueError(f"{self.label or 'return series'}: series is empty")
        if len(self.dates) != returns.size:
            raise ValueError("dates and returns have different lengths")
        if not np.all(np.isfinite(returns)):
            raise ValueError("returns must be finite")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise ValueError("dates must be strictly increasing")

    @property
    def n(self) -> int:
        return self.returns.size


# ----------------------------------------------------------------------
# loading
# ----------------------------------------------------------------------

def _read_rows(path, date_col, value_col, date_format):
    """Parse (date, value) rows. Returns (rows, problems); rows carry line numbers."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(path, [f"cannot open file: {exc}"]) from None

    problems = []
    rows = []
    with handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise IngestError(path, ["file is empty, expected a header row"])
        header = [name.strip() for name in reader.fieldnames]
        missing = [c for c in (date_col, value_col) if c not in header]
        if missing:
            raise IngestError(
                path,
                [f"missing column {c!r}; header has {header}" for c in missing])
        for record in reader:
            line = reader.line_num
            record = {(k.strip() if k else k): v for k, v in record.items()}
            raw_date = (record.get(date_col) or "").strip()
            raw_value = (record.get(value_col) or "").strip()
            parsed_date = parsed_value = None
            if not raw_date:
                problems.append(f"line {line}: empty {date_col!r} cell")
            else:
                try:
                    parsed_date = datetime.strptime(raw_date, date_format).date()
                except ValueError:
                    problems.append(
                        f"line {line}: cannot parse date {raw_date!r} with format {date_format!r}")
            if not raw_value:
                problems.append(f"line {line}: empty {value_col!r} cell")
            else:
                try:
                    parsed_value = float(raw_value)
                except ValueError:
                    problems.append(f"line {line}: cannot parse number {raw_value!r}")
                else:
                    if not math.isfinite(parsed_value):
                        problems.append(f"line {line}: non-finite value {raw_value!r}")
                        parsed_value = None
            if parsed_date is not None and parsed_value is not None:
                rows.append((parsed_date, parsed_value, line))
    return rows, problems


def _order_and_check_dates(rows, problems):
    """Sort rows by date (files may be unordered) and flag duplicate dates."""
    rows = sorted(rows, key=lambda r: r[0])
    for (d1, _, l1), (d2, _, l2) in zip(rows, rows[1:]):
        if d1 == d2:
            problems.append(f"duplicate date {d1.isoformat()} (lines {l1} and {l2})")
    return rows


def load_prices(path, date_col="date", price_col="price", date_format="%Y-%m-%d",
                label="") -> PriceSeries:
    """Load a settlement price file.

    Parameters:
    - path: CSV file with a header row.
    - date_col, price_col: column names to read.
    - date_format: strptime format for the date column.
    - label: name for the series; defaults to the file stem.

    Raises IngestError listing every malformed cell, non-positive price and
    duplicate date found. Rows are sorted by date if the file is unordered.
    """
    rows, problems = _read_rows(path, date_col, price_col, date_format)
    for d, value, line in rows:
        if value <= 0.0:
            problems.append(f"line {line}: price {value!r} is not positive")
    rows = _order_and_check_dates(rows, problems)
    if not problems and len(rows) < 2:
        problems.append(f"need at least 2 usable price rows, got {len(rows)}")
    if problems:
        raise IngestError(path, problems)
    return PriceSeries(
        label=label or _stem(path),
        dates=tuple(r[0] for r in rows),
        prices=np.array([r[1] for r in rows], dtype=float))


def load_returns(path, date_col="date", return_col="return", date_format="%Y-%m-%d",
                 label="") -> ReturnSeries:
    """Load a file of pre-computed returns; same CSV rules as load_prices."""
    rows, problems = _read_rows(path, date_col, return_col, date_format)
    rows = _order_and_check_dates(rows, problems)
    if not problems and not rows:
        problems.append("no usable return rows")
    if problems:
        raise IngestError(path, problems)
    return ReturnSeries(
        label=label or _stem(path),
        dates=tuple(r[0] for r in rows),
        returns=np.array([r[1] for r in rows], dtype=float))


def _stem(path):
    import os
    base = os.path.basename(str(path))
    return os.path.splitext(base)[0]


# ----------------------------------------------------------------------
# transforms
# ----------------------------------------------------------------------

def log_returns(series: PriceSeries) -> ReturnSeries:
    """Daily log returns ln(P_t / P_{t-1}), dated by the later observation.

    A price repeated on consecutive dates (holiday padding) produces a
    return of exactly 0.0, because x / x is exactly 1 in floating point.
    """
    p = series.prices
    r = np.log(p[1:] / p[:-1])
    return ReturnSeries(label=series.label, dates=series.dates[1:], returns=r)


def drop_zero_returns(series: ReturnSeries) -> ReturnSeries:
    """Remove returns that are exactly 0.0, e.g. from holiday-padded prices."""
    keep = series.returns != 0.0
    if not np.any(keep):
        raise ValueError(f"{series.label}: every return is zero")
    dates = tuple(d for d, k in zip(series.dates, keep) if k)
    return ReturnSeries(label=series.label, dates=dates, returns=series.returns[keep])


# ----------------------------------------------------------------------
# summary statistics
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class SummaryStats:
    """Moment summary of a return series.

    std_dev uses the n - 1 divisor. skewness and kurtosis are built from
    central moments with the n divisor; kurtosis is not excess-adjusted, so
    a normal sample sits near 3. kurtosis is None when n < 4.
    """

    n: int
    mean: float
    std_dev: float
    skewness: float
    kurtosis: float | None
    minimum: float
    maximum: float


def summary_stats(series) -> SummaryStats:
    """Compute SummaryStats for a ReturnSeries (or a bare array of returns).

    Raises ValueError for fewer than 2 observations and for a constant
    series, whose higher moments are undefined.
    """
    x = np.asarray(getattr(series, "returns", series), dtype=float)
    n = int(x.size)
    if n < 2:
        raise ValueError(f"need at least 2 observations for summary statistics, got {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite values")
    mean = float(x.mean())
    c = x - mean
    m2 = float((c ** 2).mean())
    if m2 == 0.0:
        raise ValueError("moments are undefined for a constant series")
    skew = float((c ** 3).mean()) / m2 ** 1.5
    kurt = float((c ** 4).mean()) / m2 ** 2 if n >= 4 else None
    return SummaryStats(
        n=n,
        mean=mean,
        std_dev=math.sqrt(m2 * n / (n - 1)),
        skewness=skew,
        kurtosis=kurt,
        minimum=float(x.min()),
        maximum=float(x.max()))
