"""Prediction scoring.

A pick is judged by how the stock moved relative to its benchmark index since
entry. Both moves are expressed as percentage gains (entry = 100), and the
score is their signed difference: positive when the call was right, negative
when it was wrong, and exactly antisymmetric between the two orientations.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

from .model import Config, Orientation, Prediction, PricePoint

__all__ = [
    "gain",
    "multipliers",
    "is_mature",
    "score_prediction",
    "PredictionScore",
    "PlayerScore",
    "player_score",
]


def gain(entry_value: float, observed_value: float) -> float:
    """Percentage gain with the entry price normalized to 100."""
    if not entry_value > 0:
        raise ValueError(f"entry value must be positive, got {entry_value}")
    if not observed_value > 0:
        raise ValueError(f"observed value must be positive, got {observed_value}")
    return observed_value / entry_value * 100.0


def multipliers(orientation: Orientation) -> tuple[int, int]:
    """(stock multiplier, index multiplier) for the orientation.

    Outperform rewards the stock rising above the index; underperform is its
    exact mirror, so the two multipliers always have opposite signs.
    """
    if orientation is Orientation.OUTPERFORM:
        return 1, -1
    return -1, 1


def is_mature(prediction: Prediction, config: Config, now: datetime) -> bool:
    """A pick matures once the pending period has fully elapsed (inclusive)."""
    return now >= prediction.entered_at + config.pending_period


@dataclass(frozen=True, slots=True)
class PredictionScore:
    prediction_id: str
    stock_gain: float
    index_gain: float
    stock_multiplier: int
    index_multiplier: int
    score: float
    mature: bool
    as_of: datetime


def score_prediction(
    prediction: Prediction,
    stock_now: PricePoint,
    index_now: PricePoint,
    config: Config,
    now: datetime,
) -> PredictionScore:
    """Score one pick against current observations of its stock and index."""
    if stock_now.ticker != prediction.stock_ticker:
        raise ValueError(
            f"stock observation is for {stock_now.ticker!r}, pick is on {prediction.stock_ticker!r}"
        )
    if index_now.ticker != prediction.index_ticker:
        raise ValueError(
            f"index observation is for {index_now.ticker!r}, pick uses {prediction.index_ticker!r}"
        )
    if stock_now.at > now or index_now.at > now:
        raise ValueError("observations must not be newer than the scoring time")

    stock_gain = gain(prediction.stock_entry_value, stock_now.value)
    index_gain = gain(prediction.index_entry_value, index_now.value)
    m_stock, m_index = multipliers(prediction.orientation)
    score = stock_gain * m_stock + index_gain * m_index
    return PredictionScore(
        prediction_id=prediction.id,
        stock_gain=stock_gain,
        index_gain=index_gain,
        stock_multiplier=m_stock,
        index_multiplier=m_index,
        score=score,
        mature=is_mature(prediction, config, now),
        as_of=now,
    )


@dataclass(frozen=True, slots=True)
class PlayerScore:
    player_id: str
    total_score: float
    counted_predictions: int


def player_score(player_id: str, scores: Sequence[PredictionScore], config: Config) -> PlayerScore:
    """Sum a player's mature scores.

    Positive scores below the threshold are ignored entirely; negative scores
    always count. The caller guarantees all scores belong to one player.
    """
    threshold = config.positive_score_threshold
    total = 0.0
    counted = 0
    for s in scores:
        if not s.mature:
            continue
        if 0 < s.score < threshold:
            continue
        total += s.score
        counted += 1
    return PlayerScore(player_id=player_id, total_score=total, counted_predictions=counted)
