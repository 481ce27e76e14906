"""Crowd-sourced stock prediction game.

Players call whether a stock will outperform or underperform a benchmark
index. Matured picks are scored against realized prices, players are ranked
by a blend of total score and shrunk accuracy percentiles, and the crowd's
per-stock conviction becomes a rating once enough strong picks stand behind
it. The event log is the system of record; every rating is a pure function
of (log prefix, config).
"""

from .errors import (
    ConfigError,
    CrowdpicksError,
    CsvParseError,
    DuplicatePlayerError,
    DuplicatePredictionError,
    EventLogError,
    NoQuoteError,
    RemoteFetchError,
    SnapshotError,
    UnknownInstrumentError,
    UnknownPlayerError,
)
from .model import (
    DEFAULT_CONFIG,
    Config,
    Instrument,
    Kind,
    Orientation,
    Player,
    Prediction,
    PricePoint,
    parse_config,
    serialize_config,
    validate_config,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Config",
    "DEFAULT_CONFIG",
    "Instrument",
    "Kind",
    "Orientation",
    "Player",
    "Prediction",
    "PricePoint",
    "parse_config",
    "serialize_config",
    "validate_config",
    "CrowdpicksError",
    "ConfigError",
    "CsvParseError",
    "DuplicatePlayerError",
    "DuplicatePredictionError",
    "EventLogError",
    "NoQuoteError",
    "RemoteFetchError",
    "SnapshotError",
    "UnknownInstrumentError",
    "UnknownPlayerError",
]
