"""Exception hierarchy shared by the engine, log tooling and CLI."""

from __future__ import annotations


class WerewolfSimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(WerewolfSimError):
    """Invalid game, backend or run configuration."""


class RuleViolation(WerewolfSimError):
    """An action breaks the game rules (dead target, illegal target...)."""


class ProtocolError(WerewolfSimError):
    """Inputs violate a collection contract (duplicate voter, missing analysis...)."""


class StateError(WerewolfSimError):
    """Operation requested in a phase where it is not allowed."""


class BackendError(WerewolfSimError):
    """The model gateway could not produce an answer after all retries."""


class LogIntegrityError(WerewolfSimError):
    """Append would break the gapless seq discipline of a game log."""


class ReplayError(WerewolfSimError):
    """A log cannot be folded back into a game state."""

    def __init__(self, message: str, seq: int | None = None) -> None:
        super().__init__(message if seq is None else f"seq {seq}: {message}")
        self.seq = seq
