"""Price history: CSV parsing, per-ticker series, delayed quotes, remote fetch.

The CSV schema is ``ticker,timestamp,value`` with ISO-8601 UTC timestamps.
Quotes served to the game are delayed: the freshest price anyone can act on
is the latest point at or before now minus the configured delay.
"""

from __future__ import annotations

import csv
import io
import logging
import time
from bisect import bisect_right
from dataclasses import dataclass
from datetime import datetime, timedelta

import httpx

from .errors import CsvParseError, NoQuoteError, RemoteFetchError
from .model import Config, PricePoint, format_timestamp, parse_timestamp

__all__ = [
    "PriceSeries",
    "group_series",
    "parse_price_csv",
    "serialize_price_csv",
    "delayed_quote",
    "latest_quote",
    "RemoteEndpoint",
    "fetch_remote",
]

log = logging.getLogger(__name__)

CSV_HEADER = ("ticker", "timestamp", "value")


@dataclass(frozen=True, slots=True)
class PriceSeries:
    """Chronological prices for one ticker, strictly increasing timestamps."""

    ticker: str
    points: tuple[PricePoint, ...]

    def __post_init__(self) -> None:
        previous: datetime | None = None
        for p in self.points:
            if p.ticker != self.ticker:
                raise ValueError(f"point for {p.ticker!r} in series {self.ticker!r}")
            if previous is not None and p.at <= previous:
                raise ValueError(f"series {self.ticker!r}: timestamps must strictly increase")
            previous = p.at


def group_series(points: list[PricePoint]) -> dict[str, PriceSeries]:
    """Group points into per-ticker series; a repeated timestamp keeps the later point."""
    by_ticker: dict[str, dict[datetime, PricePoint]] = {}
    for p in points:
        by_ticker.setdefault(p.ticker, {})[p.at] = p
    return {
        ticker: PriceSeries(ticker, tuple(pts[at] for at in sorted(pts)))
        for ticker, pts in sorted(by_ticker.items())
    }


def parse_price_csv(text: str) -> list[PricePoint]:
    """Parse price rows; any violation reports its 1-based line number.

    Rows need not be pre-sorted. Output is sorted by ticker, then timestamp.
    """
    reader = csv.reader(io.StringIO(text.lstrip("﻿")))
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError(1, "empty input, expected header ticker,timestamp,value") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise CsvParseError(1, f"bad header {','.join(header)!r}, expected ticker,timestamp,value")

    points: list[PricePoint] = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise CsvParseError(lineno, f"expected 3 fields, got {len(row)}")
        ticker, raw_ts, raw_value = (field.strip() for field in row)
        try:
            at = parse_timestamp(raw_ts)
        except ValueError as exc:
            raise CsvParseError(lineno, f"bad timestamp {raw_ts!r}: {exc}") from exc
        try:
            value = float(raw_value)
        except ValueError:
            raise CsvParseError(lineno, f"bad value {raw_value!r}") from None
        try:
            points.append(PricePoint(ticker=ticker, at=at, value=value))
        except ValueError as exc:
            raise CsvParseError(lineno, str(exc)) from exc
    points.sort(key=lambda p: (p.ticker, p.at))
    return points


def serialize_price_csv(points: list[PricePoint]) -> str:
    """Inverse of parse_price_csv for well-formed data."""
    lines = [",".join(CSV_HEADER)]
    for p in points:
        lines.append(f"{p.ticker},{format_timestamp(p.at)},{p.value!r}")
    return "\n".join(lines) + "\n"


def _latest_at_or_before(series: PriceSeries, cutoff: datetime) -> PricePoint | None:
    stamps = [p.at for p in series.points]
    i = bisect_right(stamps, cutoff)
    return series.points[i - 1] if i else None


def delayed_quote(series: PriceSeries, now: datetime, config: Config) -> PricePoint:
    """Latest point at or before now minus the quote delay.

    Staleness is unbounded above: an old quote is still a quote.
    """
    point = _latest_at_or_before(series, now - config.price_delay)
    if point is None:
        raise NoQuoteError(
            f"{series.ticker}: no quote at or before "
            f"{format_timestamp(now)} minus {config.price_delay}"
        )
    return point


def latest_quote(series: PriceSeries, now: datetime) -> PricePoint | None:
    """Latest observation at or before now, with no delay applied."""
    return _latest_at_or_before(series, now)


@dataclass(frozen=True, slots=True)
class RemoteEndpoint:
    base_url: str


def fetch_remote(
    endpoint: RemoteEndpoint,
    tickers: list[str],
    *,
    client: httpx.Client | None = None,
    attempts: int = 3,
    backoff: float = 0.25,
) -> list[PricePoint]:
    """Fetch quotes for tickers from /quotes?tickers=<comma-list>.

    Transient failures (transport errors, 5xx) are retried with bounded
    exponential backoff, attempts times in total. The response body uses the
    same CSV schema as local ingestion; the merged result is sorted by
    ticker, then time.
    """
    if not tickers:
        return []
    url = endpoint.base_url.rstrip("/") + "/quotes"
    params = {"tickers": ",".join(tickers)}
    owned = client is None
    http = client if client is not None else httpx.Client(timeout=10.0)
    last_error: Exception | None = None
    try:
        for attempt in range(attempts):
            if attempt:
                time.sleep(min(backoff * 2 ** (attempt - 1), 2.0))
            try:
                response = http.get(url, params=params)
            except httpx.TransportError as exc:
                last_error = exc
                log.warning("quote fetch attempt %d failed: %s", attempt + 1, exc)
                continue
            if response.status_code >= 500:
                last_error = RemoteFetchError(f"server error {response.status_code}")
                log.warning("quote fetch attempt %d got %d", attempt + 1, response.status_code)
                continue
            if response.status_code != 200:
                raise RemoteFetchError(f"quote endpoint returned {response.status_code}")
            try:
                return parse_price_csv(response.text)
            except CsvParseError as exc:
                raise CsvParseError(
                    exc.line, f"quotes for {','.join(tickers)}: {exc.message}"
                ) from exc
        raise RemoteFetchError(
            f"quote endpoint unreachable after {attempts} attempts: {last_error}"
        )
    finally:
        if owned:
            http.close()
