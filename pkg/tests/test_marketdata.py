"""Price CSV parsing, series grouping, delayed quotes, and remote fetch."""

from __future__ import annotations

import random
from datetime import timedelta

import httpx
import pytest

from crowdpicks.errors import CsvParseError, NoQuoteError, RemoteFetchError
from crowdpicks.marketdata import (
    PriceSeries,
    RemoteEndpoint,
    delayed_quote,
    fetch_remote,
    group_series,
    latest_quote,
    parse_price_csv,
    serialize_price_csv,
)
from crowdpicks.model import Config, parse_timestamp

from helpers import at, config_with, point

CONFIG = Config()

SAMPLE = (
    "ticker,timestamp,value\n"
    "VDKT-R-A,2013-01-02T15:00:00Z,207.90\n"
    "AAA,2024-01-05T09:00:00Z,10.5\n"
    "AAA,2024-01-04T09:00:00Z,10.0\n"
)


class TestParse:
    def test_rows_parse_and_sort(self):
        points = parse_price_csv(SAMPLE)
        assert [(p.ticker, p.value) for p in points] == [
            ("AAA", 10.0),
            ("AAA", 10.5),
            ("VDKT-R-A", 207.9),
        ]
        assert points[2].at == parse_timestamp("2013-01-02T15:00:00Z")

    def test_sorted_by_ticker_then_time(self):
        rng = random.Random(11)
        rows = [
            f"T{rng.randint(0, 3)},2024-01-{rng.randint(1, 28):02d}T00:00:00Z,{rng.randint(1, 99)}.0"
            for _ in range(40)
        ]
        text = "ticker,timestamp,value\n" + "\n".join(rows) + "\n"
        points = parse_price_csv(text)
        assert [(p.ticker, p.at) for p in points] == sorted((p.ticker, p.at) for p in points)

    def test_empty_input(self):
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv("")
        assert exc.value.line == 1

    def test_bad_header(self):
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv("symbol,when,price\nAAA,2024-01-01T00:00:00Z,1.0\n")
        assert exc.value.line == 1
        assert "header" in str(exc.value)

    def test_wrong_field_count_names_its_line(self):
        text = "ticker,timestamp,value\nAAA,2024-01-01T00:00:00Z,1.0\nBBB,2024-01-01T00:00:00Z\n"
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv(text)
        assert exc.value.line == 3

    def test_bad_timestamp_names_its_line(self):
        text = "ticker,timestamp,value\nAAA,yesterday,1.0\n"
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv(text)
        assert exc.value.line == 2
        assert "timestamp" in str(exc.value)

    def test_naive_timestamp_rejected(self):
        text = "ticker,timestamp,value\nAAA,2024-01-01T00:00:00,1.0\n"
        with pytest.raises(CsvParseError):
            parse_price_csv(text)

    def test_bad_value_names_its_line(self):
        text = "ticker,timestamp,value\nAAA,2024-01-01T00:00:00Z,cheap\n"
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv(text)
        assert exc.value.line == 2

    def test_non_positive_value_rejected(self):
        text = "ticker,timestamp,value\nAAA,2024-01-01T00:00:00Z,0.0\n"
        with pytest.raises(CsvParseError) as exc:
            parse_price_csv(text)
        assert exc.value.line == 2

    def test_blank_lines_skipped(self):
        text = "ticker,timestamp,value\n\nAAA,2024-01-01T00:00:00Z,1.0\n\n"
        assert len(parse_price_csv(text)) == 1

    def test_serialize_then_parse_round_trips(self):
        points = parse_price_csv(SAMPLE)
        assert parse_price_csv(serialize_price_csv(points)) == points

    def test_serialize_keeps_full_precision(self):
        pts = [point("AAA", at(0), 0.1 + 0.2)]
        assert parse_price_csv(serialize_price_csv(pts))[0].value == 0.1 + 0.2


class TestSeries:
    def test_group_series_splits_by_ticker(self):
        grouped = group_series(parse_price_csv(SAMPLE))
        assert set(grouped) == {"AAA", "VDKT-R-A"}
        assert [p.value for p in grouped["AAA"].points] == [10.0, 10.5]

    def test_group_series_same_timestamp_keeps_the_later_point(self):
        pts = [point("AAA", at(1), 5.0), point("AAA", at(1), 6.0)]
        grouped = group_series(pts)
        assert [p.value for p in grouped["AAA"].points] == [6.0]

    def test_series_rejects_unsorted_points(self):
        with pytest.raises(ValueError):
            PriceSeries("AAA", (point("AAA", at(2), 1.0), point("AAA", at(1), 2.0)))

    def test_series_rejects_foreign_ticker(self):
        with pytest.raises(ValueError):
            PriceSeries("AAA", (point("BBB", at(1), 1.0),))


class TestQuotes:
    def series(self):
        return PriceSeries(
            "AAA",
            (
                point("AAA", at(0, hours=10, minutes=0), 50.0),
                point("AAA", at(0, hours=10, minutes=10), 51.0),
            ),
        )

    def test_delay_hides_the_newest_quote(self):
        # 15 minute delay at 10:20 exposes only the 10:00 print.
        quote = delayed_quote(self.series(), at(0, hours=10, minutes=20), CONFIG)
        assert quote.value == 50.0

    def test_delay_boundary_is_inclusive(self):
        quote = delayed_quote(self.series(), at(0, hours=10, minutes=25), CONFIG)
        assert quote.value == 51.0

    def test_zero_delay_serves_the_latest_print(self):
        config = config_with(price_delay=timedelta(0))
        quote = delayed_quote(self.series(), at(0, hours=10, minutes=10), config)
        assert quote.value == 51.0

    def test_no_quote_raises(self):
        with pytest.raises(NoQuoteError) as exc:
            delayed_quote(self.series(), at(0, hours=10, minutes=5), CONFIG)
        assert "AAA" in str(exc.value)

    def test_staleness_is_unbounded(self):
        quote = delayed_quote(self.series(), at(500), CONFIG)
        assert quote.value == 51.0

    def test_latest_quote_has_no_delay(self):
        got = latest_quote(self.series(), at(0, hours=10, minutes=10))
        assert got is not None and got.value == 51.0
        assert latest_quote(self.series(), at(0, hours=9)) is None


def transport_from(handler) -> httpx.Client:
    return httpx.Client(transport=httpx.MockTransport(handler))


class TestFetchRemote:
    endpoint = RemoteEndpoint("http://quotes.internal")

    def test_healthy_fetch(self):
        seen = {}

        def handler(request: httpx.Request) -> httpx.Response:
            seen["url"] = str(request.url)
            return httpx.Response(200, text=SAMPLE)

        with transport_from(handler) as client:
            points = fetch_remote(self.endpoint, ["AAA", "VDKT-R-A"], client=client)
        assert seen["url"] == "http://quotes.internal/quotes?tickers=AAA%2CVDKT-R-A"
        assert [p.ticker for p in points] == ["AAA", "AAA", "VDKT-R-A"]

    def test_no_tickers_no_request(self):
        def handler(request: httpx.Request) -> httpx.Response:
            raise AssertionError("should not be called")

        with transport_from(handler) as client:
            assert fetch_remote(self.endpoint, [], client=client) == []

    def test_endpoint_down_fails_after_all_attempts(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            raise httpx.ConnectError("refused")

        with transport_from(handler) as client:
            with pytest.raises(RemoteFetchError) as exc:
                fetch_remote(self.endpoint, ["AAA"], client=client, backoff=0.0)
        assert len(calls) == 3
        assert "3 attempts" in str(exc.value)

    def test_flaky_endpoint_eventually_succeeds(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            if len(calls) < 3:
                raise httpx.ReadTimeout("slow")
            return httpx.Response(200, text=SAMPLE)

        with transport_from(handler) as client:
            points = fetch_remote(self.endpoint, ["AAA"], client=client, backoff=0.0)
        assert len(calls) == 3
        assert len(points) == 3

    def test_server_errors_are_retried(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            if len(calls) == 1:
                return httpx.Response(503)
            return httpx.Response(200, text=SAMPLE)

        with transport_from(handler) as client:
            points = fetch_remote(self.endpoint, ["AAA"], client=client, backoff=0.0)
        assert len(calls) == 2
        assert points

    def test_client_errors_fail_immediately(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            return httpx.Response(404)

        with transport_from(handler) as client:
            with pytest.raises(RemoteFetchError) as exc:
                fetch_remote(self.endpoint, ["AAA"], client=client, backoff=0.0)
        assert len(calls) == 1
        assert "404" in str(exc.value)

    def test_malformed_body_is_not_retried(self):
        calls = []

        def handler(request: httpx.Request) -> httpx.Response:
            calls.append(1)
            return httpx.Response(200, text="ticker,timestamp,value\nAAA,bad,1.0\n")

        with transport_from(handler) as client:
            with pytest.raises(CsvParseError) as exc:
                fetch_remote(self.endpoint, ["AAA", "BBB"], client=client, backoff=0.0)
        assert len(calls) == 1
        assert exc.value.line == 2
        assert "AAA,BBB" in str(exc.value)
