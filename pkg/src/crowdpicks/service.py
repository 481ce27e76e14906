"""Application service: the single writer over the event log.

All reads are answered from the materialized state plus a ratings view that
is recomputed lazily and memoized against the log's last sequence number, so
repeated reads between writes cost one computation and never touch the log.
"""

from __future__ import annotations

import threading
from bisect import bisect_right
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .errors import (
    DuplicatePlayerError,
    DuplicatePredictionError,
    UnknownInstrumentError,
    UnknownPlayerError,
)
from .events import Event, EventStore, GameState, PriceObservation, load_snapshot
from .marketdata import delayed_quote
from .model import (
    Config,
    Instrument,
    Kind,
    Orientation,
    Player,
    Prediction,
    PricePoint,
    validate_config,
)
from .ranking import (
    LeaderboardEntry,
    PlayerStats,
    PoolAggregates,
    accuracy,
    bayesian_accuracy,
    build_leaderboard,
    pool_aggregates,
)
from .scoring import PredictionScore, player_score, score_prediction
from .stocks import (
    MONTH_LOOKBACK,
    YEAR_LOOKBACK,
    StockRating,
    lookback_gain,
    rate_all_stocks,
)

__all__ = ["RatingsView", "compute_ratings", "RatedStock", "GameService"]


@dataclass(frozen=True)
class RatingsView:
    """Everything derived from one log prefix. Immutable once built."""

    seq: int
    as_of: datetime | None
    picks: tuple[tuple[Prediction, PredictionScore], ...]
    stats: dict[str, PlayerStats]
    pool: PoolAggregates
    leaderboard: tuple[LeaderboardEntry, ...]
    stock_ratings: tuple[StockRating, ...]


def _latest_in(points: Sequence[PricePoint], now: datetime) -> PricePoint | None:
    stamps = [p.at for p in points]
    i = bisect_right(stamps, now)
    return points[i - 1] if i else None


def compute_ratings(state: GameState, config: Config | None = None) -> RatingsView:
    """Derive scores, player stats, the leaderboard, and stock ratings.

    A pure function of the state; "now" is the state clock (timestamp of the
    latest applied event).
    """
    cfg = config if config is not None else state.config
    now = state.last_at
    if now is None:
        return RatingsView(
            seq=0,
            as_of=None,
            picks=(),
            stats={},
            pool=pool_aggregates([]),
            leaderboard=(),
            stock_ratings=(),
        )

    picks: list[tuple[Prediction, PredictionScore]] = []
    for p in state.predictions:
        stock_now = _latest_in(state.prices[p.stock_ticker], now)
        index_now = _latest_in(state.prices[p.index_ticker], now)
        if stock_now is None or index_now is None:
            raise RuntimeError(f"pick {p.id}: no observation at or before the state clock")
        picks.append((p, score_prediction(p, stock_now, index_now, cfg, now)))

    by_player: dict[str, list[PredictionScore]] = {pid: [] for pid in state.players}
    for p, s in picks:
        by_player[p.player_id].append(s)

    stats: dict[str, PlayerStats] = {}
    for pid in sorted(state.players):
        scores = by_player[pid]
        mature = [s for s in scores if s.mature]
        count = len(mature)
        positive = sum(1 for s in mature if s.score > 0)
        alpha = accuracy(count, positive)
        totals = player_score(pid, scores, cfg)
        stats[pid] = PlayerStats(
            player_id=pid,
            prediction_count=count,
            positive_count=positive,
            accuracy=alpha,
            total_score=totals.total_score,
            counted_predictions=totals.counted_predictions,
            weighted_accuracy=count * alpha,
        )

    active_ids = [
        pid
        for pid in sorted(state.players)
        if stats[pid].prediction_count >= cfg.min_player_mature_predictions
    ]
    pool = pool_aggregates([stats[pid] for pid in active_ids])
    for pid in active_ids:
        stats[pid] = replace(
            stats[pid], bayesian_accuracy=bayesian_accuracy(stats[pid], pool, cfg)
        )

    leaderboard = build_leaderboard([stats[pid] for pid in active_ids], cfg)
    stock_ratings = rate_all_stocks(picks, leaderboard, cfg)

    return RatingsView(
        seq=state.last_seq,
        as_of=now,
        picks=tuple(picks),
        stats=stats,
        pool=pool,
        leaderboard=tuple(leaderboard),
        stock_ratings=tuple(stock_ratings),
    )


@dataclass(frozen=True, slots=True)
class RatedStock:
    """A stock rating joined with its recent price moves for presentation."""

    rating: StockRating
    gain_1y: float | None
    gain_1m: float | None


class GameService:
    """Single-writer game facade over an event store."""

    def __init__(
        self,
        store: EventStore,
        *,
        snapshot_path: str | Path | None = None,
        clock: Callable[[], datetime] | None = None,
    ):
        self._store = store
        base = None
        if snapshot_path is not None and Path(snapshot_path).exists():
            base = load_snapshot(snapshot_path)
        self._state = store.replay(base=base)
        self._clock = clock or (lambda: datetime.now(timezone.utc))
        self._lock = threading.RLock()
        self._view_cache: RatingsView | None = None

    # -- write side ---------------------------------------------------------

    def _append_time(self, at: datetime | None) -> datetime:
        """Event timestamps never decrease, even if the host clock does."""
        candidate = at if at is not None else self._clock()
        if self._state.last_at is not None and candidate < self._state.last_at:
            return self._state.last_at
        return candidate

    def _append(self, payload, at: datetime | None) -> Event:
        event = self._store.append(payload, self._append_time(at))
        self._state.apply(event)
        return event

    def register_player(self, player_id: str, name: str, at: datetime | None = None) -> Player:
        with self._lock:
            if player_id in self._state.players:
                raise DuplicatePlayerError(f"player {player_id!r} already registered")
            when = self._append_time(at)
            player = Player(id=player_id, name=name, registered_at=when)
            self._append(player, when)
            return player

    def ingest_prices(self, points: Sequence[PricePoint], kind: Kind) -> int:
        """Append one observation per point, ordered by (timestamp, ticker).

        Kind conflicts are rejected before anything is written; each event's
        timestamp is the point's own timestamp, so backfilling older history
        than the log tail is refused by the store.
        """
        with self._lock:
            for point in points:
                known = self._state.kinds.get(point.ticker)
                if known is not None and known is not kind:
                    raise UnknownInstrumentError(
                        f"{point.ticker!r} is already registered as {known.value}"
                    )
            for point in sorted(points, key=lambda p: (p.at, p.ticker)):
                self._append(PriceObservation(point=point, kind=kind), point.at)
            return len(points)

    def change_config(self, config: Config, at: datetime | None = None) -> None:
        with self._lock:
            validate_config(config)
            self._append(config, at)

    def submit_prediction(
        self,
        player_id: str,
        stock_ticker: str,
        index_ticker: str,
        orientation: Orientation,
        at: datetime | None = None,
    ) -> Prediction:
        """Validate, capture delayed entry quotes, and append the pick."""
        with self._lock:
            state = self._state
            if player_id not in state.players:
                raise UnknownPlayerError(f"unknown player {player_id!r}")
            if state.kinds.get(stock_ticker) is not Kind.STOCK:
                raise UnknownInstrumentError(f"unknown stock {stock_ticker!r}")
            if state.kinds.get(index_ticker) is not Kind.INDEX:
                raise UnknownInstrumentError(f"unknown index {index_ticker!r}")
            if state.has_open_pick(player_id, stock_ticker):
                raise DuplicatePredictionError(
                    f"player {player_id!r} already has an open pick on {stock_ticker!r}"
                )
            now = self._append_time(at)
            stock_entry = delayed_quote(state.series(stock_ticker), now, state.config)
            index_entry = delayed_quote(state.series(index_ticker), now, state.config)
            prediction = Prediction(
                id=f"pick-{self._store.last_seq + 1:06d}",
                player_id=player_id,
                stock_ticker=stock_ticker,
                index_ticker=index_ticker,
                orientation=orientation,
                entered_at=now,
                stock_entry_value=stock_entry.value,
                index_entry_value=index_entry.value,
            )
            self._append(prediction, now)
            return prediction

    # -- read side ----------------------------------------------------------

    def view(self) -> RatingsView:
        with self._lock:
            cached = self._view_cache
            if cached is None or cached.seq != self._state.last_seq:
                self._view_cache = compute_ratings(self._state)
            return self._view_cache

    @property
    def seq(self) -> int:
        return self._state.last_seq

    @property
    def config(self) -> Config:
        return self._state.config

    def has_open_pick(self, player_id: str, stock_ticker: str) -> bool:
        with self._lock:
            return self._state.has_open_pick(player_id, stock_ticker)

    def instruments(self) -> list[Instrument]:
        with self._lock:
            return [
                Instrument(ticker=t, kind=k) for t, k in sorted(self._state.kinds.items())
            ]

    def player_name(self, player_id: str) -> str | None:
        player = self._state.players.get(player_id)
        return player.name if player else None

    def leaderboard(self) -> list[LeaderboardEntry]:
        """Entries sorted by rating percentile, best first."""
        entries = list(self.view().leaderboard)
        entries.sort(key=lambda e: (-e.rating_percentile, e.player_id))
        return entries

    def stock_ratings(self) -> list[RatedStock]:
        """Ratings sorted best first; unqualified stocks trail in ticker order."""
        view = self.view()
        with self._lock:
            now = self._state.last_at
            rated = []
            for rating in view.stock_ratings:
                series = self._state.series(rating.ticker)
                rated.append(
                    RatedStock(
                        rating=rating,
                        gain_1y=lookback_gain(series, now, YEAR_LOOKBACK),
                        gain_1m=lookback_gain(series, now, MONTH_LOOKBACK),
                    )
                )
        rated.sort(
            key=lambda r: (
                r.rating.percentile is None,
                -(r.rating.percentile or 0.0),
                r.rating.ticker,
            )
        )
        return rated

    def player_view(self, player_id: str) -> tuple[PlayerStats, LeaderboardEntry | None]:
        view = self.view()
        stats = view.stats.get(player_id)
        if stats is None:
            raise UnknownPlayerError(f"unknown player {player_id!r}")
        entry = next((e for e in view.leaderboard if e.player_id == player_id), None)
        return stats, entry

    def predictions(self, player_id: str | None = None) -> list[tuple[Prediction, PredictionScore]]:
        if player_id is not None and player_id not in self._state.players:
            raise UnknownPlayerError(f"unknown player {player_id!r}")
        view = self.view()
        return [
            (p, s) for p, s in view.picks if player_id is None or p.player_id == player_id
        ]
