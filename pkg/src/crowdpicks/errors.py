"""Exception types shared across the package."""

from __future__ import annotations


class CrowdpicksError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CrowdpicksError):
    """Invalid configuration value or malformed config file."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class CsvParseError(CrowdpicksError):
    """Malformed price CSV. Carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line
        self.message = message


class NoQuoteError(CrowdpicksError):
    """No price point old enough to satisfy the quote delay."""


class RemoteFetchError(CrowdpicksError):
    """Remote quote endpoint unreachable after all retry attempts."""


class EventLogError(CrowdpicksError):
    """Corrupt or inconsistent event log. Carries the first bad sequence number."""

    def __init__(self, seq: int, message: str):
        super().__init__(f"event {seq}: {message}")
        self.seq = seq


class SnapshotError(CrowdpicksError):
    """Snapshot file is unreadable, has a bad checksum, or an unknown version."""


class UnknownPlayerError(CrowdpicksError):
    """Referenced player id is not registered."""


class UnknownInstrumentError(CrowdpicksError):
    """Referenced ticker is not a known instrument of the required kind."""


class DuplicatePlayerError(CrowdpicksError):
    """Player id is already registered."""


class DuplicatePredictionError(CrowdpicksError):
    """Player already has an open prediction on this stock."""
