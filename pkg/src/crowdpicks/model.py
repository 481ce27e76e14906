"""Core domain values: instruments, prices, players, predictions, and configuration.

Everything here is an immutable value. Timestamps are timezone-aware UTC
datetimes and serialize to ISO-8601 with a ``Z`` suffix.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, fields
from datetime import datetime, timedelta, timezone

from .errors import ConfigError

__all__ = [
    "Kind",
    "Orientation",
    "Instrument",
    "PricePoint",
    "Player",
    "Prediction",
    "Config",
    "DEFAULT_CONFIG",
    "validate_config",
    "parse_config",
    "serialize_config",
    "parse_timestamp",
    "format_timestamp",
]


# ---------------------------------------------------------------------------
# timestamps

def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 timestamp; must carry an explicit UTC offset or Z."""
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        raise ValueError(f"timestamp {text!r} has no timezone")
    return dt.astimezone(timezone.utc)


def format_timestamp(dt: datetime) -> str:
    if dt.tzinfo is None:
        raise ValueError("naive datetime cannot be formatted")
    return dt.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


# ---------------------------------------------------------------------------
# instruments and prices

class Kind(enum.Enum):
    STOCK = "stock"
    INDEX = "index"


class Orientation(enum.Enum):
    OUTPERFORM = "outperform"
    UNDERPERFORM = "underperform"


@dataclass(frozen=True, slots=True)
class Instrument:
    ticker: str
    kind: Kind

    def __post_init__(self) -> None:
        if not self.ticker:
            raise ValueError("ticker must be non-empty")


@dataclass(frozen=True, slots=True)
class PricePoint:
    ticker: str
    at: datetime
    value: float

    def __post_init__(self) -> None:
        if not self.ticker:
            raise ValueError("ticker must be non-empty")
        if self.at.tzinfo is None:
            raise ValueError("price timestamp must be timezone-aware")
        if not self.value > 0:
            raise ValueError(f"price value must be positive, got {self.value}")


# ---------------------------------------------------------------------------
# players and predictions

@dataclass(frozen=True, slots=True)
class Player:
    id: str
    name: str
    registered_at: datetime

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("player id must be non-empty")


@dataclass(frozen=True, slots=True)
class Prediction:
    """One pick: a stock called to outperform or underperform a benchmark index.

    Entry values are the delayed quotes captured when the pick was submitted;
    they never change afterwards.
    """

    id: str
    player_id: str
    stock_ticker: str
    index_ticker: str
    orientation: Orientation
    entered_at: datetime
    stock_entry_value: float
    index_entry_value: float

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("prediction id must be non-empty")
        if self.stock_ticker == self.index_ticker:
            raise ValueError("stock and index must be distinct instruments")
        if not self.stock_entry_value > 0 or not self.index_entry_value > 0:
            raise ValueError("entry values must be positive")
        if self.entered_at.tzinfo is None:
            raise ValueError("entered_at must be timezone-aware")


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True, slots=True)
class Config:
    """Game tunables. All rating output is a pure function of (event log, config)."""

    pending_period: timedelta = timedelta(days=7)
    min_stock_predictions: int = 5
    min_top_player_percentile: float = 60.0
    accuracy_normalization_cap: int = 100
    score_blend_weights: tuple[float, float] = (2 / 3, 1 / 3)
    positive_score_threshold: float = 0.0
    min_player_mature_predictions: int = 1
    rating_weight_exponent: float = 1.0
    price_delay: timedelta = timedelta(minutes=15)


DEFAULT_CONFIG = Config()

_DAY = timedelta(days=1)
_MINUTE = timedelta(minutes=1)


def validate_config(config: Config) -> None:
    """Raise ConfigError naming the first violated field."""
    pp = config.pending_period
    if pp <= timedelta(0) or pp % _DAY != timedelta(0):
        raise ConfigError("pending_period", "must be a positive whole number of days")
    if config.price_delay < timedelta(0) or config.price_delay % _MINUTE != timedelta(0):
        raise ConfigError("price_delay", "must be a non-negative whole number of minutes")
    if config.min_stock_predictions < 0:
        raise ConfigError("min_stock_predictions", "must be >= 0")
    if not 0 <= config.min_top_player_percentile <= 100:
        raise ConfigError("min_top_player_percentile", "must be within [0, 100]")
    if config.accuracy_normalization_cap < 0:
        raise ConfigError("accuracy_normalization_cap", "must be >= 0")
    ws, wa = config.score_blend_weights
    if not (0 <= ws <= 1 and 0 <= wa <= 1) or abs((ws + wa) - 1.0) > 1e-12:
        raise ConfigError("score_blend_weights", "weights must lie in [0, 1] and sum to 1")
    if config.positive_score_threshold < 0:
        raise ConfigError("positive_score_threshold", "must be >= 0")
    if config.min_player_mature_predictions < 0:
        raise ConfigError("min_player_mature_predictions", "must be >= 0")
    if config.rating_weight_exponent < 1:
        raise ConfigError("rating_weight_exponent", "must be >= 1")


# Config file format: one "key = value" per line, UTF-8. Blank lines and
# lines starting with "#" are ignored. Durations are written as whole days
# ("7d") or whole minutes ("15m"); fractions as plain decimals. The two blend
# weights are split into score_weight / accuracy_weight keys.

_DURATION_RE = re.compile(r"^(\d+)([dm])$")

_INT_KEYS = {
    "min_stock_predictions",
    "accuracy_normalization_cap",
    "min_player_mature_predictions",
}
_FLOAT_KEYS = {
    "min_top_player_percentile",
    "score_weight",
    "accuracy_weight",
    "positive_score_threshold",
    "rating_weight_exponent",
}
_DURATION_KEYS = {"pending_period", "price_delay"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _DURATION_KEYS


def _parse_duration(key: str, raw: str) -> timedelta:
    m = _DURATION_RE.match(raw)
    if m is None:
        raise ConfigError(key, f"bad duration {raw!r}, expected e.g. 7d or 15m")
    amount, unit = int(m.group(1)), m.group(2)
    return timedelta(days=amount) if unit == "d" else timedelta(minutes=amount)


def _format_duration(delta: timedelta) -> str:
    if delta % _DAY == timedelta(0) and delta != timedelta(0):
        return f"{delta // _DAY}d"
    if delta % _MINUTE == timedelta(0):
        return f"{delta // _MINUTE}m"
    raise ValueError(f"duration {delta!r} is not a whole number of minutes")


def parse_config(text: str) -> Config:
    """Parse the flat key = value config format. Unknown keys are an error.

    Missing keys keep their defaults, so a partial file is valid.
    """
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}", f"expected key = value, got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(key, f"unknown config key (line {lineno})")
        if key in values:
            raise ConfigError(key, f"duplicate config key (line {lineno})")
        try:
            if key in _INT_KEYS:
                values[key] = int(raw)
            elif key in _FLOAT_KEYS:
                values[key] = float(raw)
            else:
                values[key] = _parse_duration(key, raw)
        except ValueError as exc:
            raise ConfigError(key, f"bad value {raw!r} (line {lineno}): {exc}") from exc

    kwargs: dict[str, object] = {}
    field_names = {f.name for f in fields(Config)}
    ws = values.pop("score_weight", None)
    wa = values.pop("accuracy_weight", None)
    if (ws is None) != (wa is None):
        raise ConfigError("score_blend_weights", "score_weight and accuracy_weight must be set together")
    if ws is not None:
        kwargs["score_blend_weights"] = (ws, wa)
    for key, value in values.items():
        assert key in field_names
        kwargs[key] = value
    config = Config(**kwargs)  # type: ignore[arg-type]
    validate_config(config)
    return config


def serialize_config(config: Config) -> str:
    """Render a config file that parses back to an identical Config."""
    ws, wa = config.score_blend_weights
    lines = [
        f"pending_period = {_format_duration(config.pending_period)}",
        f"price_delay = {_format_duration(config.price_delay)}",
        f"min_stock_predictions = {config.min_stock_predictions}",
        f"min_top_player_percentile = {config.min_top_player_percentile!r}",
        f"accuracy_normalization_cap = {config.accuracy_normalization_cap}",
        f"score_weight = {ws!r}",
        f"accuracy_weight = {wa!r}",
        f"positive_score_threshold = {config.positive_score_threshold!r}",
        f"min_player_mature_predictions = {config.min_player_mature_predictions}",
        f"rating_weight_exponent = {config.rating_weight_exponent!r}",
    ]
    return "\n".join(lines) + "\n"
