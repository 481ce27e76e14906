"""Per-stock crowd ratings and the top-stocks report.

A stock earns a rating only when enough mature picks exist and at least one
sufficiently strong player stands behind one of them; this keeps thin or
low-quality crowds from moving the board. The rating itself is the rating-
weighted share of outperform conviction among all picks on the stock.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Iterable, Mapping, Sequence

from .marketdata import PriceSeries, latest_quote
from .model import Config, Orientation, Prediction
from .ranking import LeaderboardEntry, percentile_ranks
from .scoring import PredictionScore

__all__ = [
    "qualify",
    "stock_score",
    "StockRating",
    "rate_all_stocks",
    "ReportRow",
    "report_top",
    "render_report_csv",
    "lookback_gain",
    "YEAR_LOOKBACK",
    "MONTH_LOOKBACK",
]

YEAR_LOOKBACK = timedelta(days=365)
MONTH_LOOKBACK = timedelta(days=30)


def qualify(
    ticker: str,
    active_predictions: int,
    predictor_rating_percentiles: Sequence[float],
    config: Config,
) -> bool:
    """Gate a stock on pick volume and on its best predictor's rating.

    The percentile gate is strict: the best predictor must rank strictly
    above the configured floor.
    """
    if active_predictions < config.min_stock_predictions:
        return False
    best = max(predictor_rating_percentiles, default=0.0)
    return best > config.min_top_player_percentile


def _transformed_mass(percentiles: Iterable[float], exponent: float) -> float:
    if exponent == 1.0:
        return float(sum(percentiles))
    return float(sum(p**exponent for p in percentiles))


def stock_score(
    outperform_percentiles: Sequence[float],
    underperform_percentiles: Sequence[float],
    config: Config,
) -> float:
    """Outperform conviction share in [0, 1], weighted by predictor rating.

    Percentiles are raised to the configured exponent before summing, so a
    larger exponent concentrates influence in the top-ranked players. The
    smaller side's share is computed by division and the larger side as its
    complement, which makes the two orientations sum to exactly 1.
    """
    if not outperform_percentiles and not underperform_percentiles:
        raise ValueError("cannot score a stock with no rated predictors")
    e = config.rating_weight_exponent
    mass_out = _transformed_mass(outperform_percentiles, e)
    mass_under = _transformed_mass(underperform_percentiles, e)
    total = mass_out + mass_under
    if total == 0:
        raise ValueError("cannot score a stock whose predictors all have zero weight")
    if mass_out <= mass_under:
        return mass_out / total
    return 1.0 - mass_under / total


@dataclass(frozen=True, slots=True)
class StockRating:
    ticker: str
    qualified: bool
    prediction_count: int
    outperform_mass: float
    underperform_mass: float
    score: float
    percentile: float | None


def rate_all_stocks(
    scored: Sequence[tuple[Prediction, PredictionScore]],
    leaderboard: Sequence[LeaderboardEntry],
    config: Config,
) -> list[StockRating]:
    """Rate every stock that has at least one pick.

    Only mature picks count, and only ranked predictors contribute weight.
    Percentiles are assigned across qualified stocks alone; unqualified
    stocks carry none. Output is sorted by ticker.
    """
    rating_by_player = {entry.player_id: entry.rating_percentile for entry in leaderboard}
    e = config.rating_weight_exponent

    counts: dict[str, int] = {}
    sides: dict[str, tuple[list[float], list[float]]] = {}
    for prediction, score in scored:
        ticker = prediction.stock_ticker
        counts.setdefault(ticker, 0)
        sides.setdefault(ticker, ([], []))
        if not score.mature:
            continue
        counts[ticker] += 1
        rating = rating_by_player.get(prediction.player_id)
        if rating is None:
            continue
        out, under = sides[ticker]
        (out if prediction.orientation is Orientation.OUTPERFORM else under).append(rating)

    ratings: list[StockRating] = []
    for ticker in sorted(counts):
        out, under = sides[ticker]
        qualified = qualify(ticker, counts[ticker], out + under, config)
        if out or under:
            score_value = stock_score(out, under, config)
        else:
            score_value = 0.0
        ratings.append(
            StockRating(
                ticker=ticker,
                qualified=qualified,
                prediction_count=counts[ticker],
                outperform_mass=_transformed_mass(out, e),
                underperform_mass=_transformed_mass(under, e),
                score=score_value,
                percentile=None,
            )
        )

    qualified_scores = [(r.ticker, r.score) for r in ratings if r.qualified]
    percentile_by_ticker = dict(percentile_ranks(qualified_scores))
    return [
        StockRating(
            ticker=r.ticker,
            qualified=r.qualified,
            prediction_count=r.prediction_count,
            outperform_mass=r.outperform_mass,
            underperform_mass=r.underperform_mass,
            score=r.score,
            percentile=percentile_by_ticker.get(r.ticker),
        )
        for r in ratings
    ]


@dataclass(frozen=True, slots=True)
class ReportRow:
    ticker: str
    rank: float
    gain_1y: float | None
    gain_1m: float | None


def lookback_gain(series: PriceSeries | None, now: datetime, lookback: timedelta) -> float | None:
    """Signed percentage move over the lookback window, None when history is short."""
    if series is None:
        return None
    current = latest_quote(series, now)
    past = latest_quote(series, now - lookback)
    if current is None or past is None:
        return None
    return 100.0 * (current.value / past.value - 1.0)


def report_top(
    ratings: Sequence[StockRating],
    price_history: Mapping[str, PriceSeries],
    n: int,
    now: datetime,
) -> list[ReportRow]:
    """Top n qualified stocks by rating percentile, with 1y/1m price moves."""
    qualified = [r for r in ratings if r.percentile is not None]
    qualified.sort(key=lambda r: (-r.percentile, r.ticker))  # type: ignore[operator]
    rows = []
    for r in qualified[:n]:
        series = price_history.get(r.ticker)
        rows.append(
            ReportRow(
                ticker=r.ticker,
                rank=r.percentile,  # type: ignore[arg-type]
                gain_1y=lookback_gain(series, now, YEAR_LOOKBACK),
                gain_1m=lookback_gain(series, now, MONTH_LOOKBACK),
            )
        )
    return rows


def render_report_csv(rows: Sequence[ReportRow]) -> str:
    """Two-decimal fixed-point CSV; absent gains render as empty fields."""
    lines = ["ticker,rank,gain_1y,gain_1m"]
    for row in rows:
        gain_1y = "" if row.gain_1y is None else f"{row.gain_1y:.2f}"
        gain_1m = "" if row.gain_1m is None else f"{row.gain_1m:.2f}"
        lines.append(f"{row.ticker},{row.rank:.2f},{gain_1y},{gain_1m}")
    return "\n".join(lines) + "\n"
