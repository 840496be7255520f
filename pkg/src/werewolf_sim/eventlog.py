"""Append-only NDJSON event log, one file per game.

Each line is one JSON object with the envelope keys in fixed order::

    {"game_id": ..., "seq": 1, "wall_time": "...", "kind": "GameStarted",
     "visibility": "public", "payload": {...}}

``visibility`` is ``public``, ``researcher``, ``role:<Role>`` or ``private:<player id>``.
Floats are written with Python's shortest round-trip repr, so values read back
are bit-identical to the values written.
"""

from __future__ import annotations

import datetime as _dt
import enum
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

from werewolf_sim.errors import LogIntegrityError


class EventKind(str, enum.Enum):
    GAME_STARTED = "GameStarted"
    ROLE_ASSIGNED = "RoleAssigned"
    PACK_FORMED = "PackFormed"
    NIGHT_ACTIONS_RESOLVED = "NightActionsResolved"
    BIDS_COLLECTED = "BidsCollected"
    PROMPT_ISSUED = "PromptIssued"
    RAW_OUTPUT = "RawOutput"
    REPAIR_APPLIED = "RepairApplied"
    STATEMENT_MADE = "StatementMade"
    SCRATCHPAD_APPENDED = "ScratchpadAppended"
    SELF_ANALYSIS_RECORDED = "SelfAnalysisRecorded"
    PEER_ANALYSIS_RECORDED = "PeerAnalysisRecorded"
    SUSPICION_UPDATED = "SuspicionUpdated"
    VOTES_CAST = "VotesCast"
    EXILE_RESOLVED = "ExileResolved"
    PHASE_ADVANCED = "PhaseAdvanced"
    STATE_SNAPSHOT = "StateSnapshot"
    VICTORY_DECLARED = "VictoryDeclared"
    GAME_ABORTED = "GameAborted"


TERMINAL_KINDS = frozenset({EventKind.VICTORY_DECLARED, EventKind.GAME_ABORTED})


class Visibility:
    PUBLIC = "public"
    RESEARCHER = "researcher"

    @staticmethod
    def role(role) -> str:
        return f"role:{getattr(role, 'value', role)}"

    @staticmethod
    def private(player_id: str) -> str:
        return f"private:{player_id}"

    @staticmethod
    def visible_to(visibility: str, player_id: str, role) -> bool:
        """Whether an agent (``player_id`` holding ``role``) may see a record."""
        if visibility == Visibility.PUBLIC:
            return True
        if visibility == Visibility.role(role):
            return True
        return visibility == Visibility.private(player_id)


def utc_now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class EventRecord:
    game_id: str
    seq: int
    wall_time: str
    kind: EventKind
    visibility: str
    payload: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {
            "game_id": self.game_id,
            "seq": self.seq,
            "wall_time": self.wall_time,
            "kind": self.kind.value,
            "visibility": self.visibility,
            "payload": self.payload,
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> EventRecord:
        return cls(
            game_id=d["game_id"],
            seq=d["seq"],
            wall_time=d["wall_time"],
            kind=EventKind(d["kind"]),
            visibility=d["visibility"],
            payload=d["payload"],
        )


def dumps(obj: Any) -> str:
    # ensure_ascii keeps every line 7-bit clean; json escapes any newline inside strings
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


class LogWriter:
    """Single writer for one game's log.

    Every record is written and flushed before ``append`` returns, so callers can
    mutate state right after (write-ahead). Listeners see each record after it
    is on disk.
    """

    def __init__(
        self,
        game_id: str,
        path: str | os.PathLike | None = None,
        *,
        fsync: bool = False,
        clock: Callable[[], str] = utc_now,
        log_prompts: bool = True,
    ) -> None:
        self.game_id = game_id
        self.path = Path(path) if path is not None else None
        self.fsync = fsync
        self.clock = clock
        self.log_prompts = log_prompts
        self.records: list[EventRecord] = []
        self.listeners: list[Callable[[EventRecord], None]] = []
        self._fh = None
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("w", encoding="utf-8", newline="\n")

    @property
    def last_seq(self) -> int:
        return self.records[-1].seq if self.records else 0

    def append(self, kind: EventKind, visibility: str, payload: dict[str, Any]) -> EventRecord:
        rec = EventRecord(self.game_id, self.last_seq + 1, self.clock(), EventKind(kind), visibility, payload)
        return self.append_record(rec)

    def append_record(self, rec: EventRecord) -> EventRecord:
        if rec.seq != self.last_seq + 1:
            raise LogIntegrityError(f"expected seq {self.last_seq + 1}, got {rec.seq}")
        if rec.game_id != self.game_id:
            raise LogIntegrityError(f"record for game {rec.game_id!r} in log of {self.game_id!r}")
        line = rec.to_json()
        if self._fh is not None:
            self._fh.write(line + "\n")
            self._fh.flush()
            if self.fsync:
                os.fsync(self._fh.fileno())
        self.records.append(rec)
        for listener in self.listeners:
            listener(rec)
        return rec

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> LogWriter:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


@dataclass
class ParsedLog:
    records: list[EventRecord]
    bad_lines: list[tuple[int, str]]  # (1-based line number, error)
    trailing_partial: bool = False

    @property
    def complete(self) -> bool:
        return bool(self.records) and self.records[-1].kind in TERMINAL_KINDS


def iter_lines(path: str | os.PathLike) -> Iterator[tuple[int, str, bool]]:
    """Yield (line number, text, newline-terminated) for every non-empty line."""
    with open(path, "r", encoding="utf-8") as fh:
        for i, raw in enumerate(fh, start=1):
            terminated = raw.endswith("\n")
            text = raw.rstrip("\n")
            if text.strip():
                yield i, text, terminated


def read_log(path: str | os.PathLike, *, skip_kinds: Iterable[str] = ()) -> ParsedLog:
    """Parse a game log, tolerating (and flagging) an unterminated final line.

    Lines whose kind is in ``skip_kinds`` are dropped before JSON decoding; the
    check relies on the fixed envelope key order.
    """
    skip = tuple(f'"kind":"{k}"' for k in skip_kinds)
    records: list[EventRecord] = []
    bad: list[tuple[int, str]] = []
    trailing = False
    for lineno, text, terminated in iter_lines(path):
        if skip and any(s in text[:160] for s in skip):
            continue
        try:
            records.append(EventRecord.from_dict(json.loads(text)))
        except (ValueError, KeyError, TypeError) as exc:
            if not terminated:
                trailing = True
            else:
                bad.append((lineno, f"{type(exc).__name__}: {exc}"))
    return ParsedLog(records, bad, trailing)


def mask_wall_time(line: str) -> str:
    """Drop the timestamp from one serialized record (for determinism checks)."""
    d = json.loads(line)
    d["wall_time"] = ""
    return dumps(d)
