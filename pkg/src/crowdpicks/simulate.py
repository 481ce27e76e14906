"""Seeded synthetic games for exercising the whole stack.

The market is a per-stock geometric random walk; the benchmark index is the
equal-weighted average of all stock prices. Three agent populations make
picks: skilled players call the realized direction with a per-agent success
bias, noise players flip a coin, and imitators copy the current top-rated
player's latest pick a fixed number of days later. Everything is driven by
one seeded RNG, so a given (spec, config) pair always produces an identical
event log.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from random import Random

from .events import EventStore
from .model import Config, Kind, Orientation, PricePoint
from .service import GameService

__all__ = ["SimulationSpec", "SimulationSummary", "run_simulation", "PICKS_PER_PLAYER"]

log = logging.getLogger(__name__)

# Default pick density, chosen so the reference population of 47 players
# lands on 667 picks in total.
PICKS_PER_PLAYER = 667 / 47

SIM_START = datetime(2024, 1, 1, tzinfo=timezone.utc)
INDEX_TICKER = "IDX"

_PRICES_AT = timedelta(hours=9)
_PICKS_AT = timedelta(hours=12)


@dataclass(frozen=True, slots=True)
class SimulationSpec:
    players: int
    stocks: int
    days: int
    seed: int
    imitators: int = 0
    lag_days: int = 1
    picks_per_player: float = PICKS_PER_PLAYER


@dataclass(frozen=True, slots=True)
class SimulationSummary:
    players: int
    imitators: int
    stocks: int
    days: int
    predictions: int
    events: int


def _validate_spec(spec: SimulationSpec, config: Config) -> int:
    if spec.players < 1:
        raise ValueError("need at least one player")
    if spec.stocks < 1:
        raise ValueError("need at least one stock")
    if spec.seed is None:
        raise ValueError("a seed is required")
    if spec.imitators < 0 or spec.lag_days < 1:
        raise ValueError("imitators must be >= 0 and lag >= 1 day")
    pending_days = config.pending_period // timedelta(days=1)
    last_entry_day = spec.days - 2 - pending_days
    if last_entry_day < 0:
        raise ValueError(
            f"{spec.days} days leaves no room for a pick to mature; "
            f"need at least {pending_days + 2}"
        )
    return last_entry_day


def run_simulation(store: EventStore, spec: SimulationSpec, config: Config) -> SimulationSummary:
    """Generate a full synthetic game into an empty event store."""
    if store.last_seq != 0:
        raise ValueError("simulation needs an empty event log")
    last_entry_day = _validate_spec(spec, config)
    rng = Random(spec.seed)

    tickers = [f"S{i:03d}" for i in range(1, spec.stocks + 1)]
    player_ids = [f"pl-{i:03d}" for i in range(1, spec.players + 1)]
    imitator_ids = [f"im-{i:03d}" for i in range(1, spec.imitators + 1)]

    # Market paths, drawn up front so pick outcomes can anchor agent skill.
    drifts = {t: rng.uniform(-0.0015, 0.0025) for t in tickers}
    vols = {t: rng.uniform(0.005, 0.025) for t in tickers}
    values = {t: [rng.uniform(20.0, 400.0)] for t in tickers}
    for _ in range(1, spec.days):
        for t in tickers:
            step = math.exp(rng.gauss(drifts[t], vols[t]))
            values[t].append(values[t][-1] * step)
    index_values = [
        sum(values[t][day] for t in tickers) / spec.stocks for day in range(spec.days)
    ]

    # Per-agent success bias: skilled players beat the coin, noise players are the coin.
    bias = {
        pid: rng.uniform(0.55, 0.9) if rng.random() < 0.6 else 0.5 for pid in player_ids
    }

    # Pick schedule: a fixed total spread over players, distinct stocks each.
    total_picks = round(spec.players * spec.picks_per_player)
    base, leftover = divmod(total_picks, spec.players)
    bonus = set(rng.sample(range(spec.players), leftover))
    if base + (1 if leftover else 0) > spec.stocks:
        raise ValueError("not enough stocks for the requested picks per player")
    schedule: dict[int, list[tuple[str, str]]] = {day: [] for day in range(spec.days)}
    for i, pid in enumerate(player_ids):
        count = base + (1 if i in bonus else 0)
        for ticker in rng.sample(tickers, count):
            schedule[rng.randint(0, last_entry_day)].append((pid, ticker))
    for day in schedule:
        schedule[day].sort()

    def day_at(day: int, offset: timedelta) -> datetime:
        return SIM_START + timedelta(days=day) + offset

    def realized_winner(ticker: str, day: int) -> Orientation:
        stock_move = values[ticker][-1] / values[ticker][day]
        index_move = index_values[-1] / index_values[day]
        return Orientation.OUTPERFORM if stock_move > index_move else Orientation.UNDERPERFORM

    service = GameService(store, clock=lambda: SIM_START)
    service.change_config(config, at=day_at(0, timedelta(0)))
    for pid in imitator_ids:
        service.register_player(pid, f"Imitator {pid[3:]}", at=day_at(0, timedelta(hours=1)))
    for pid in player_ids:
        service.register_player(pid, f"Player {pid[3:]}", at=day_at(0, timedelta(hours=1)))

    predictions = 0
    latest_by_player: dict[str, tuple[int, str, Orientation]] = {}
    for day in range(spec.days):
        at = day_at(day, _PRICES_AT)
        service.ingest_prices(
            [PricePoint(INDEX_TICKER, at, index_values[day])], Kind.INDEX
        )
        service.ingest_prices(
            [PricePoint(t, at, values[t][day]) for t in tickers], Kind.STOCK
        )

        entered_at = day_at(day, _PICKS_AT)
        for pid, ticker in schedule[day]:
            winner = realized_winner(ticker, day)
            if rng.random() < bias[pid]:
                orientation = winner
            else:
                orientation = (
                    Orientation.UNDERPERFORM
                    if winner is Orientation.OUTPERFORM
                    else Orientation.OUTPERFORM
                )
            service.submit_prediction(pid, ticker, INDEX_TICKER, orientation, at=entered_at)
            latest_by_player[pid] = (day, ticker, orientation)
            predictions += 1

        # Imitators trail the reigning leader by exactly lag_days.
        if imitator_ids and day <= last_entry_day:
            leaders = service.leaderboard()
            if leaders:
                top = leaders[0].player_id
                latest = latest_by_player.get(top)
                if latest is not None and latest[0] + spec.lag_days == day:
                    _, ticker, orientation = latest
                    for pid in imitator_ids:
                        if pid != top and not service.has_open_pick(pid, ticker):
                            service.submit_prediction(
                                pid, ticker, INDEX_TICKER, orientation, at=entered_at
                            )
                            latest_by_player[pid] = (day, ticker, orientation)
                            predictions += 1

    log.info("simulated %d picks over %d days", predictions, spec.days)
    return SimulationSummary(
        players=spec.players,
        imitators=spec.imitators,
        stocks=spec.stocks,
        days=spec.days,
        predictions=predictions,
        events=store.last_seq,
    )
