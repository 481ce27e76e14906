"""Player accuracy, Bayesian shrinkage, percentile ranks, and the leaderboard.

Accuracy is the share of a player's mature picks that scored strictly above
zero. Raw accuracy is unreliable for players with few picks, so it is shrunk
toward the pool mean in proportion to how far the player's pick count sits
below the normalization cap. The leaderboard blends score and accuracy
percentiles into a single rating percentile.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from typing import Hashable, Iterable, Sequence, TypeVar

from .model import Config

__all__ = [
    "accuracy",
    "PlayerStats",
    "PoolAggregates",
    "pool_aggregates",
    "bayesian_accuracy",
    "percentile_ranks",
    "raw_rating",
    "LeaderboardEntry",
    "build_leaderboard",
]

K = TypeVar("K", bound=Hashable)


def accuracy(prediction_count: int, positive_count: int) -> float:
    """Percentage of mature picks with a strictly positive score."""
    if prediction_count < 0 or positive_count < 0:
        raise ValueError("counts must be non-negative")
    if positive_count > prediction_count:
        raise ValueError("positive count cannot exceed prediction count")
    if prediction_count == 0:
        return 0.0
    return 100.0 * positive_count / prediction_count


@dataclass(frozen=True, slots=True)
class PlayerStats:
    """Per-player aggregates over mature picks.

    bayesian_accuracy is filled in once the pool aggregates are known; until
    then it is None.
    """

    player_id: str
    prediction_count: int
    positive_count: int
    accuracy: float
    total_score: float
    counted_predictions: int
    weighted_accuracy: float
    bayesian_accuracy: float | None = None


@dataclass(frozen=True, slots=True)
class PoolAggregates:
    active_player_count: int
    total_predictions: int
    mean_prediction_count: float
    mean_accuracy: float


def pool_aggregates(stats: Sequence[PlayerStats]) -> PoolAggregates:
    """Aggregate over active players only; the caller pre-filters."""
    n = len(stats)
    if n == 0:
        return PoolAggregates(0, 0, 0.0, 0.0)
    total = sum(s.prediction_count for s in stats)
    return PoolAggregates(
        active_player_count=n,
        total_predictions=total,
        mean_prediction_count=total / n,
        mean_accuracy=sum(s.accuracy for s in stats) / n,
    )


def bayesian_accuracy(stats: PlayerStats, pool: PoolAggregates, config: Config) -> float:
    """Shrink raw accuracy toward the pool mean for players below the cap.

    The player's own accuracy enters weighted by their pick count, the pool
    mean by the mean pick count; at or above the cap the raw accuracy stands.
    """
    count = stats.prediction_count
    if count >= config.accuracy_normalization_cap:
        return stats.accuracy
    denominator = count + pool.mean_prediction_count
    if denominator == 0:
        return stats.accuracy
    return (pool.mean_prediction_count * pool.mean_accuracy + count * stats.accuracy) / denominator


def percentile_ranks(values: Sequence[tuple[K, float]]) -> list[tuple[K, float]]:
    """Percentile of each value within the ascending order, in (0, 100].

    Percentile = 100 * position / n with 1-based positions; tied values share
    the smallest position of their group. Output preserves input order.
    """
    n = len(values)
    if n == 0:
        return []
    ordered = sorted(v for _, v in values)
    # bisect_left counts strictly smaller values, which is exactly the
    # minimum 1-based position minus one.
    return [(key, 100.0 * (bisect_left(ordered, v) + 1) / n) for key, v in values]


def raw_rating(score_percentile: float, accuracy_percentile: float, config: Config) -> float:
    """Weighted blend of the two percentiles (weights sum to 1)."""
    w_score, w_accuracy = config.score_blend_weights
    return w_score * score_percentile + w_accuracy * accuracy_percentile


@dataclass(frozen=True, slots=True)
class LeaderboardEntry:
    player_id: str
    score_percentile: float
    accuracy_percentile: float
    raw_rating: float
    rating_percentile: float


def build_leaderboard(stats: Sequence[PlayerStats], config: Config) -> list[LeaderboardEntry]:
    """Rank active players. Entries come back in input order.

    Every stats record must already carry its bayesian accuracy.
    """
    for s in stats:
        if s.bayesian_accuracy is None:
            raise ValueError(f"player {s.player_id}: bayesian accuracy not computed")
    score_pct = percentile_ranks([(s.player_id, s.total_score) for s in stats])
    accuracy_pct = percentile_ranks([(s.player_id, s.bayesian_accuracy) for s in stats])

    ratings: list[tuple[str, float]] = []
    for (pid, y_score), (_, y_accuracy) in zip(score_pct, accuracy_pct):
        ratings.append((pid, raw_rating(y_score, y_accuracy, config)))
    rating_pct = percentile_ranks(ratings)

    entries = []
    for (pid, y_score), (_, y_accuracy), (_, r), (_, y_rating) in zip(
        score_pct, accuracy_pct, ratings, rating_pct
    ):
        entries.append(
            LeaderboardEntry(
                player_id=pid,
                score_percentile=y_score,
                accuracy_percentile=y_accuracy,
                raw_rating=r,
                rating_percentile=y_rating,
            )
        )
    return entries
