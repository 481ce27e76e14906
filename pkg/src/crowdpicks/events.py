"""Append-only event log, replay, and snapshots.

The log is the system of record: one JSON object per line, sequence numbers
contiguous from 1, timestamps never decreasing. Each line carries a CRC over
its canonical serialization so corruption is detected at replay time, naming
the first bad sequence number. Replay is a pure left-fold into GameState;
"now" for any derived computation is the timestamp of the latest applied
event, never the host clock.

Snapshots capture the folded state at a covering sequence number so a restart
can skip re-deriving the prefix. A snapshot plus a replay of the remaining
suffix must equal a full replay, byte for byte in any rendered output.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import zlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta
from pathlib import Path
from typing import Iterator, Union

from .errors import EventLogError, SnapshotError
from .marketdata import PriceSeries
from .model import (
    Config,
    Kind,
    Orientation,
    Player,
    Prediction,
    PricePoint,
    format_timestamp,
    parse_timestamp,
    validate_config,
)

__all__ = [
    "PriceObservation",
    "Event",
    "EventStore",
    "GameState",
    "write_snapshot",
    "load_snapshot",
    "SNAPSHOT_VERSION",
]

log = logging.getLogger(__name__)

SNAPSHOT_VERSION = 1

_CANONICAL = {"sort_keys": True, "separators": (",", ":")}


@dataclass(frozen=True, slots=True)
class PriceObservation:
    """A price point plus the instrument kind it registers on first sight."""

    point: PricePoint
    kind: Kind


Payload = Union[Player, Prediction, PriceObservation, Config]

_TYPE_NAMES: dict[type, str] = {
    Player: "player_registered",
    Prediction: "prediction_entered",
    PriceObservation: "price_observed",
    Config: "config_changed",
}


@dataclass(frozen=True, slots=True)
class Event:
    seq: int
    at: datetime
    type: str
    payload: Payload


# ---------------------------------------------------------------------------
# payload codecs

def _encode_config(config: Config) -> dict:
    return {
        "pending_period_days": config.pending_period // timedelta(days=1),
        "price_delay_minutes": config.price_delay // timedelta(minutes=1),
        "min_stock_predictions": config.min_stock_predictions,
        "min_top_player_percentile": config.min_top_player_percentile,
        "accuracy_normalization_cap": config.accuracy_normalization_cap,
        "score_blend_weights": list(config.score_blend_weights),
        "positive_score_threshold": config.positive_score_threshold,
        "min_player_mature_predictions": config.min_player_mature_predictions,
        "rating_weight_exponent": config.rating_weight_exponent,
    }


def _decode_config(data: dict) -> Config:
    ws, wa = data["score_blend_weights"]
    return Config(
        pending_period=timedelta(days=data["pending_period_days"]),
        price_delay=timedelta(minutes=data["price_delay_minutes"]),
        min_stock_predictions=data["min_stock_predictions"],
        min_top_player_percentile=data["min_top_player_percentile"],
        accuracy_normalization_cap=data["accuracy_normalization_cap"],
        score_blend_weights=(ws, wa),
        positive_score_threshold=data["positive_score_threshold"],
        min_player_mature_predictions=data["min_player_mature_predictions"],
        rating_weight_exponent=data["rating_weight_exponent"],
    )


def _encode_payload(payload: Payload) -> dict:
    if isinstance(payload, Player):
        return {
            "id": payload.id,
            "name": payload.name,
            "registered_at": format_timestamp(payload.registered_at),
        }
    if isinstance(payload, Prediction):
        return {
            "id": payload.id,
            "player_id": payload.player_id,
            "stock_ticker": payload.stock_ticker,
            "index_ticker": payload.index_ticker,
            "orientation": payload.orientation.value,
            "entered_at": format_timestamp(payload.entered_at),
            "stock_entry_value": payload.stock_entry_value,
            "index_entry_value": payload.index_entry_value,
        }
    if isinstance(payload, PriceObservation):
        return {
            "ticker": payload.point.ticker,
            "at": format_timestamp(payload.point.at),
            "value": payload.point.value,
            "kind": payload.kind.value,
        }
    if isinstance(payload, Config):
        return _encode_config(payload)
    raise TypeError(f"unsupported payload type {type(payload).__name__}")


def _decode_payload(type_name: str, data: dict) -> Payload:
    if type_name == "player_registered":
        return Player(
            id=data["id"],
            name=data["name"],
            registered_at=parse_timestamp(data["registered_at"]),
        )
    if type_name == "prediction_entered":
        return Prediction(
            id=data["id"],
            player_id=data["player_id"],
            stock_ticker=data["stock_ticker"],
            index_ticker=data["index_ticker"],
            orientation=Orientation(data["orientation"]),
            entered_at=parse_timestamp(data["entered_at"]),
            stock_entry_value=data["stock_entry_value"],
            index_entry_value=data["index_entry_value"],
        )
    if type_name == "price_observed":
        return PriceObservation(
            point=PricePoint(
                ticker=data["ticker"],
                at=parse_timestamp(data["at"]),
                value=data["value"],
            ),
            kind=Kind(data["kind"]),
        )
    if type_name == "config_changed":
        return _decode_config(data)
    raise ValueError(f"unknown event type {type_name!r}")


def _checksum(record: dict) -> str:
    canonical = json.dumps(record, **_CANONICAL).encode("utf-8")
    return f"{zlib.crc32(canonical):08x}"


def _encode_line(event: Event) -> str:
    record = {
        "seq": event.seq,
        "at": format_timestamp(event.at),
        "type": event.type,
        "payload": _encode_payload(event.payload),
    }
    record["crc"] = _checksum(record)
    return json.dumps(record, **_CANONICAL) + "\n"


# ---------------------------------------------------------------------------
# materialized state

@dataclass
class GameState:
    """Left-fold of the event log. Mutated only by apply()."""

    players: dict[str, Player] = field(default_factory=dict)
    predictions: list[Prediction] = field(default_factory=list)
    kinds: dict[str, Kind] = field(default_factory=dict)
    prices: dict[str, list[PricePoint]] = field(default_factory=dict)
    config: Config = field(default_factory=Config)
    last_seq: int = 0
    last_at: datetime | None = None

    def __post_init__(self) -> None:
        self._open_picks = {(p.player_id, p.stock_ticker) for p in self.predictions}

    def copy(self) -> GameState:
        return GameState(
            players=dict(self.players),
            predictions=list(self.predictions),
            kinds=dict(self.kinds),
            prices={ticker: list(points) for ticker, points in self.prices.items()},
            config=self.config,
            last_seq=self.last_seq,
            last_at=self.last_at,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GameState):
            return NotImplemented
        return (
            self.players == other.players
            and self.predictions == other.predictions
            and self.kinds == other.kinds
            and self.prices == other.prices
            and self.config == other.config
            and self.last_seq == other.last_seq
            and self.last_at == other.last_at
        )

    def series(self, ticker: str) -> PriceSeries | None:
        points = self.prices.get(ticker)
        if not points:
            return None
        return PriceSeries(ticker, tuple(points))

    def has_open_pick(self, player_id: str, stock_ticker: str) -> bool:
        return (player_id, stock_ticker) in self._open_picks

    def apply(self, event: Event) -> None:
        payload = event.payload
        if isinstance(payload, Player):
            if payload.id in self.players:
                raise EventLogError(event.seq, f"player {payload.id!r} already registered")
            self.players[payload.id] = payload
        elif isinstance(payload, Prediction):
            self._apply_prediction(event.seq, payload)
        elif isinstance(payload, PriceObservation):
            self._apply_price(event.seq, payload)
        elif isinstance(payload, Config):
            try:
                validate_config(payload)
            except Exception as exc:
                raise EventLogError(event.seq, f"invalid config: {exc}") from exc
            self.config = payload
        else:
            raise EventLogError(event.seq, f"unsupported payload {type(payload).__name__}")
        self.last_seq = event.seq
        self.last_at = event.at

    def _apply_prediction(self, seq: int, prediction: Prediction) -> None:
        if prediction.player_id not in self.players:
            raise EventLogError(seq, f"unknown player {prediction.player_id!r}")
        if self.kinds.get(prediction.stock_ticker) is not Kind.STOCK:
            raise EventLogError(seq, f"{prediction.stock_ticker!r} is not a known stock")
        if self.kinds.get(prediction.index_ticker) is not Kind.INDEX:
            raise EventLogError(seq, f"{prediction.index_ticker!r} is not a known index")
        key = (prediction.player_id, prediction.stock_ticker)
        if key in self._open_picks:
            raise EventLogError(
                seq,
                f"player {prediction.player_id!r} already has an open pick on {prediction.stock_ticker!r}",
            )
        self.predictions.append(prediction)
        self._open_picks.add(key)

    def _apply_price(self, seq: int, observation: PriceObservation) -> None:
        point = observation.point
        known = self.kinds.get(point.ticker)
        if known is None:
            self.kinds[point.ticker] = observation.kind
        elif known is not observation.kind:
            raise EventLogError(
                seq, f"{point.ticker!r} already registered as {known.value}, got {observation.kind.value}"
            )
        points = self.prices.setdefault(point.ticker, [])
        if points:
            last = points[-1]
            if point.at < last.at:
                raise EventLogError(
                    seq, f"price for {point.ticker!r} moves backwards in time"
                )
            if point.at == last.at:
                points[-1] = point  # re-observation at the same instant wins
                return
        points.append(point)


# ---------------------------------------------------------------------------
# the store

class EventStore:
    """Line-delimited event log on disk. Single writer, any number of readers."""

    def __init__(self, path: str | Path, *, durable: bool = True):
        self.path = Path(path)
        self.durable = durable
        self._append_handle = None
        self.last_seq, self.last_at = self._scan_tail()

    def _scan_tail(self) -> tuple[int, datetime | None]:
        if not self.path.exists():
            return 0, None
        last_line = None
        count = 0
        with self.path.open("r", encoding="utf-8") as f:
            for line in f:
                if line.strip():
                    last_line = line
                    count += 1
        if last_line is None:
            return 0, None
        try:
            record = json.loads(last_line)
            return record["seq"], parse_timestamp(record["at"])
        except (ValueError, KeyError) as exc:
            raise EventLogError(count, f"unreadable final record: {exc}") from exc

    def close(self) -> None:
        if self._append_handle is not None:
            self._append_handle.close()
            self._append_handle = None

    def __enter__(self) -> EventStore:
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def append(self, payload: Payload, at: datetime) -> Event:
        """Durably append one event and return it with its assigned sequence number."""
        if self.last_at is not None and at < self.last_at:
            raise EventLogError(
                self.last_seq + 1,
                f"timestamp {format_timestamp(at)} is older than the log tail",
            )
        type_name = _TYPE_NAMES.get(type(payload))
        if type_name is None:
            raise TypeError(f"unsupported payload type {type(payload).__name__}")
        event = Event(seq=self.last_seq + 1, at=at, type=type_name, payload=payload)
        if self._append_handle is None:
            self._append_handle = self.path.open("a", encoding="utf-8")
        self._append_handle.write(_encode_line(event))
        self._append_handle.flush()
        if self.durable:
            os.fsync(self._append_handle.fileno())
        self.last_seq = event.seq
        self.last_at = at
        return event

    def events(self, start: int = 1, up_to: int | None = None) -> Iterator[Event]:
        """Yield events with start <= seq <= up_to, verifying the whole prefix.

        Sequence contiguity is checked from the first line; checksums are
        verified for every yielded record.
        """
        if not self.path.exists():
            return
        expected = 1
        with self.path.open("r", encoding="utf-8") as f:
            for line in f:
                if not line.strip():
                    continue
                if up_to is not None and expected > up_to:
                    return
                if expected < start:
                    # Skipped prefix: check ordering only, the snapshot that
                    # let us skip it already vouched for the content.
                    try:
                        seq = json.loads(line)["seq"]
                    except (ValueError, KeyError) as exc:
                        raise EventLogError(expected, f"unreadable record: {exc}") from exc
                    if seq != expected:
                        raise EventLogError(expected, f"sequence gap, found {seq}")
                    expected += 1
                    continue
                yield self._decode_line(line, expected)
                expected += 1
        if up_to is not None and expected <= up_to:
            raise EventLogError(expected, "log ends before requested sequence number")

    def _decode_line(self, line: str, expected: int) -> Event:
        try:
            record = json.loads(line)
        except ValueError as exc:
            raise EventLogError(expected, f"unreadable record: {exc}") from exc
        crc = record.pop("crc", None)
        if crc is None or _checksum(record) != crc:
            raise EventLogError(expected, "checksum mismatch")
        if record.get("seq") != expected:
            raise EventLogError(expected, f"sequence gap, found {record.get('seq')}")
        try:
            at = parse_timestamp(record["at"])
            payload = _decode_payload(record["type"], record["payload"])
        except (KeyError, ValueError) as exc:
            raise EventLogError(expected, f"bad record: {exc}") from exc
        return Event(seq=expected, at=at, type=record["type"], payload=payload)

    def replay(self, up_to: int | None = None, base: GameState | None = None) -> GameState:
        """Fold events into state. With a base, only the suffix is folded."""
        state = base.copy() if base is not None else GameState()
        previous_at = state.last_at
        for event in self.events(start=state.last_seq + 1, up_to=up_to):
            if previous_at is not None and event.at < previous_at:
                raise EventLogError(event.seq, "timestamps move backwards")
            state.apply(event)
            previous_at = event.at
        return state


# ---------------------------------------------------------------------------
# snapshots

def _encode_state(state: GameState) -> dict:
    return {
        "config": _encode_config(state.config),
        "last_seq": state.last_seq,
        "last_at": None if state.last_at is None else format_timestamp(state.last_at),
        "players": [
            _encode_payload(state.players[pid]) for pid in sorted(state.players)
        ],
        "predictions": [_encode_payload(p) for p in state.predictions],
        "instruments": [
            {"ticker": ticker, "kind": state.kinds[ticker].value}
            for ticker in sorted(state.kinds)
        ],
        "prices": {
            ticker: [[format_timestamp(p.at), p.value] for p in points]
            for ticker, points in sorted(state.prices.items())
        },
    }


def _decode_state(data: dict) -> GameState:
    players = [_decode_payload("player_registered", p) for p in data["players"]]
    predictions = [_decode_payload("prediction_entered", p) for p in data["predictions"]]
    kinds = {row["ticker"]: Kind(row["kind"]) for row in data["instruments"]}
    prices = {
        ticker: [
            PricePoint(ticker=ticker, at=parse_timestamp(at), value=value)
            for at, value in points
        ]
        for ticker, points in data["prices"].items()
    }
    last_at = data["last_at"]
    return GameState(
        players={p.id: p for p in players},  # type: ignore[union-attr]
        predictions=predictions,  # type: ignore[arg-type]
        kinds=kinds,
        prices=prices,
        config=_decode_config(data["config"]),
        last_seq=data["last_seq"],
        last_at=None if last_at is None else parse_timestamp(last_at),
    )


def write_snapshot(state: GameState, path: str | Path) -> None:
    doc = {
        "version": SNAPSHOT_VERSION,
        "seq": state.last_seq,
        "state": _encode_state(state),
    }
    digest = hashlib.sha256(json.dumps(doc, **_CANONICAL).encode("utf-8")).hexdigest()
    doc["sha256"] = digest
    Path(path).write_text(json.dumps(doc, **_CANONICAL) + "\n", encoding="utf-8")


def load_snapshot(path: str | Path) -> GameState:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise SnapshotError(f"unreadable snapshot: {exc}") from exc
    if not isinstance(doc, dict):
        raise SnapshotError("snapshot is not an object")
    digest = doc.pop("sha256", None)
    if digest is None or hashlib.sha256(
        json.dumps(doc, **_CANONICAL).encode("utf-8")
    ).hexdigest() != digest:
        raise SnapshotError("snapshot checksum mismatch")
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {doc.get('version')!r}")
    state = _decode_state(doc["state"])
    if state.last_seq != doc["seq"]:
        raise SnapshotError("snapshot covering sequence number disagrees with state")
    return state
