"""File ingestion: price CSV parsing, outlier cleaning, news JSONL.

Price files carry a `date,close` header with ISO dates. News files are
JSONL with `date`, `headline`, `body`, `source` keys. Both parsers
report the offending line number on malformed input.
"""

from __future__ import annotations

import csv
import datetime as dt
import json
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, InsufficientDataError, ParseError
from .timeseries import PriceSeries

log = logging.getLogger(__name__)

OUTLIER_WINDOW = 5  # trading days on each side


@dataclass(frozen=True)
class RawNewsItem:
    date: dt.date
    headline: str
    body: str
    source: str

    def __post_init__(self):
        if not self.headline:
            raise ValueError("news item must have a nonempty headline")

    @property
    def text(self) -> str:
        return f"{self.headline} {self.body}".strip()


def parse_price_csv(path) -> PriceSeries:
    """Read, sort, and deduplicate a `date,close` file."""
    rows = {}
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("price file is empty", line=0) from None
        if [h.strip().lower() for h in header] != ["date", "close"]:
            raise ParseError(
                f"expected header 'date,close', got {','.join(header)!r}", line=1
            )
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 2:
                raise ParseError(
                    f"line {lineno}: expected 2 fields, got {len(row)}", line=lineno
                )
            try:
                date = dt.date.fromisoformat(row[0].strip())
            except ValueError:
                raise ParseError(
                    f"line {lineno}: unparseable date {row[0]!r}", line=lineno
                ) from None
            try:
                close = float(row[1])
            except ValueError:
                raise ParseError(
                    f"line {lineno}: unparseable price {row[1]!r}", line=lineno
                ) from None
            if not np.isfinite(close):
                raise ParseError(
                    f"line {lineno}: non-finite price", line=lineno
                )
            if date in rows and rows[date] != close:
                raise ParseError(
                    f"line {lineno}: conflicting prices for {date.isoformat()}",
                    line=lineno,
                )
            rows[date] = close
    if not rows:
        raise ParseError("price file has no data rows", line=0)
    dates = sorted(rows)
    return PriceSeries(dates=tuple(dates),
                       values=np.array([rows[d] for d in dates]))


def clean_outliers(series: PriceSeries) -> PriceSeries:
    """Replace nonpositive prices by the lowest positive neighbor.

    The neighborhood is +-OUTLIER_WINDOW trading days. Replacements are
    logged; a window with no positive value is unrecoverable.
    """
    values = series.values.copy()
    for i in np.flatnonzero(values <= 0.0):
        lo, hi = max(0, i - OUTLIER_WINDOW), i + OUTLIER_WINDOW + 1
        window = series.values[lo:hi]
        positive = window[window > 0.0]
        if positive.size == 0:
            raise DegenerateSeriesError(
                f"no positive price within {OUTLIER_WINDOW} trading days of "
                f"{series.dates[i].isoformat()}"
            )
        replacement = float(positive.min())
        log.info("replaced %s price %.4f with %.4f",
                 series.dates[i].isoformat(), values[i], replacement)
        values[i] = replacement
    return PriceSeries(dates=series.dates, values=values)


def parse_news_jsonl(path, filter_terms=()) -> dict:
    """Retained news items grouped into per-date clusters.

    An item is retained when its headline or body contains any filter
    term, case-insensitively; an empty term list retains everything.
    """
    terms = [t.lower() for t in filter_terms if t]
    grouped = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError(
                    f"line {lineno}: invalid JSON", line=lineno
                ) from None
            try:
                item = RawNewsItem(
                    date=dt.date.fromisoformat(str(obj["date"])),
                    headline=str(obj["headline"]),
                    body=str(obj.get("body", "")),
                    source=str(obj.get("source", "")),
                )
            except KeyError as missing:
                raise ParseError(
                    f"line {lineno}: missing key {missing}", line=lineno
                ) from None
            except ValueError as bad:
                raise ParseError(f"line {lineno}: {bad}", line=lineno) from None
            haystack = item.text.lower()
            if terms and not any(t in haystack for t in terms):
                continue
            grouped.setdefault(item.date, []).append(item)
    return {date: grouped[date] for date in sorted(grouped)}
