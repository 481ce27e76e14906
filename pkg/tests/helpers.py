"""Shared builders for tests."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone

from crowdpicks.model import Config, Orientation, Prediction, PricePoint
from crowdpicks.ranking import LeaderboardEntry, PlayerStats
from crowdpicks.scoring import PredictionScore

BASE = datetime(2024, 1, 1, tzinfo=timezone.utc)


def at(days: float = 0, hours: float = 0, minutes: float = 0) -> datetime:
    return BASE + timedelta(days=days, hours=hours, minutes=minutes)


def make_prediction(
    pid: str = "pick-1",
    player_id: str = "pl-1",
    stock: str = "AAA",
    index: str = "IDX",
    orientation: Orientation = Orientation.OUTPERFORM,
    entered_at: datetime | None = None,
    stock_entry: float = 100.0,
    index_entry: float = 100.0,
) -> Prediction:
    return Prediction(
        id=pid,
        player_id=player_id,
        stock_ticker=stock,
        index_ticker=index,
        orientation=orientation,
        entered_at=entered_at if entered_at is not None else at(0, hours=12),
        stock_entry_value=stock_entry,
        index_entry_value=index_entry,
    )


def make_score(
    score: float,
    mature: bool = True,
    pid: str = "pick-1",
    as_of: datetime | None = None,
) -> PredictionScore:
    return PredictionScore(
        prediction_id=pid,
        stock_gain=100.0 + score,
        index_gain=100.0,
        stock_multiplier=1,
        index_multiplier=-1,
        score=score,
        mature=mature,
        as_of=as_of if as_of is not None else at(10),
    )


def make_stats(
    player_id: str,
    prediction_count: int = 1,
    positive_count: int = 1,
    total_score: float = 0.0,
    accuracy: float | None = None,
    bayesian: float | None = None,
) -> PlayerStats:
    alpha = (
        accuracy
        if accuracy is not None
        else (100.0 * positive_count / prediction_count if prediction_count else 0.0)
    )
    return PlayerStats(
        player_id=player_id,
        prediction_count=prediction_count,
        positive_count=positive_count,
        accuracy=alpha,
        total_score=total_score,
        counted_predictions=prediction_count,
        weighted_accuracy=prediction_count * alpha,
        bayesian_accuracy=bayesian,
    )


def make_entry(player_id: str, rating_percentile: float) -> LeaderboardEntry:
    return LeaderboardEntry(
        player_id=player_id,
        score_percentile=rating_percentile,
        accuracy_percentile=rating_percentile,
        raw_rating=rating_percentile,
        rating_percentile=rating_percentile,
    )


def point(ticker: str, when: datetime, value: float) -> PricePoint:
    return PricePoint(ticker=ticker, at=when, value=value)


def config_with(**overrides) -> Config:
    return Config(**overrides)
