"""Statement-level deception records and the smoothed suspicion matrix."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from werewolf_sim.errors import ProtocolError
from werewolf_sim.game import Phase

if TYPE_CHECKING:
    from werewolf_sim.eventlog import LogWriter

INITIAL_SUSPICION = 0.5


class DeceptionType(str, enum.Enum):
    NONE = "none"
    OMISSION = "omission"
    DISTORTION = "distortion"
    MISDIRECTION = "misdirection"
    FABRICATION = "fabrication"


@dataclass(frozen=True)
class Statement:
    id: str
    speaker: str
    round: int
    phase: Phase
    turn_index: int
    text: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "speaker": self.speaker,
            "round": self.round,
            "phase": self.phase.value,
            "turn_index": self.turn_index,
            "text": self.text,
        }


def _check_unit(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and 0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class SelfAnalysis:
    statement: str
    deceptive: int
    confidence: float
    dtype: DeceptionType
    reasoning: str = ""

    def __post_init__(self) -> None:
        if self.deceptive not in (0, 1):
            raise ValueError("deceptive must be 0 or 1")
        _check_unit("confidence", self.confidence)
        if (self.deceptive == 0) != (self.dtype is DeceptionType.NONE):
            raise ValueError("dtype must be 'none' exactly when the statement is not deceptive")


@dataclass(frozen=True)
class PeerAnalysis:
    statement: str
    observer: str
    deceptive: int
    confidence: float
    dtype_guess: DeceptionType
    suspicion: float
    reasoning: str = ""

    def __post_init__(self) -> None:
        if self.deceptive not in (0, 1):
            raise ValueError("deceptive must be 0 or 1")
        _check_unit("confidence", self.confidence)
        _check_unit("suspicion", self.suspicion)


class SuspicionMatrix:
    """Smoothed suspicion D[(observer, target)] for every ordered pair of distinct players."""

    __slots__ = ("_d",)

    def __init__(self, values: Mapping[tuple[str, str], float]) -> None:
        self._d = dict(values)

    @classmethod
    def initial(cls, ids: Sequence[str], prior: float = INITIAL_SUSPICION) -> SuspicionMatrix:
        return cls({(o, t): prior for o in ids for t in ids if o != t})

    def __getitem__(self, pair: tuple[str, str]) -> float:
        return self._d[pair]

    def __contains__(self, pair: object) -> bool:
        return pair in self._d

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SuspicionMatrix) and self._d == other._d

    def __len__(self) -> int:
        return len(self._d)

    def __repr__(self) -> str:
        return f"SuspicionMatrix({len(self._d)} entries)"

    def items(self):
        return self._d.items()

    def row(self, observer: str) -> dict[str, float]:
        return {t: v for (o, t), v in self._d.items() if o == observer}

    def with_value(self, observer: str, target: str, value: float) -> SuspicionMatrix:
        d = dict(self._d)
        d[(observer, target)] = value
        return SuspicionMatrix(d)

    def to_list(self) -> list[list]:
        return [[o, t, v] for (o, t), v in sorted(self._d.items())]

    @classmethod
    def from_list(cls, rows: Iterable[Sequence]) -> SuspicionMatrix:
        return cls({(o, t): float(v) for o, t, v in rows})


def smooth(previous: float, s: float, alpha: float) -> float:
    """One step of the exponential smoothing recurrence."""
    return alpha * s + (1.0 - alpha) * previous


def update_suspicion(D: SuspicionMatrix, observer: str, target: str, s: float, alpha: float) -> SuspicionMatrix:
    _check_unit("suspicion", s)
    if not (isinstance(alpha, (int, float)) and 0.0 < alpha <= 1.0):
        raise ValueError(f"alpha must lie in (0, 1], got {alpha!r}")
    if observer == target:
        raise ValueError("observer and target must differ")
    if (observer, target) not in D:
        raise KeyError((observer, target))
    return D.with_value(observer, target, smooth(D[observer, target], s, alpha))


def record_statement_round(
    statement: Statement,
    self_a: SelfAnalysis,
    peers: Iterable[PeerAnalysis],
    D: SuspicionMatrix,
    *,
    observers: Iterable[str],
    alpha: float,
    log: LogWriter | None = None,
) -> SuspicionMatrix:
    """Persist the analyses of one statement, then fold every observer's suspicion into D.

    ``observers`` is the set of living non-speakers, each of which must contribute
    exactly one peer analysis.
    """
    from werewolf_sim.eventlog import EventKind, Visibility

    peers = list(peers)
    expected = set(observers)
    if statement.speaker in expected:
        raise ProtocolError("the speaker cannot observe their own statement")
    if self_a.statement != statement.id:
        raise ProtocolError("self-analysis belongs to a different statement")
    got: set[str] = set()
    for pa in peers:
        if pa.statement != statement.id:
            raise ProtocolError(f"peer analysis by {pa.observer} belongs to a different statement")
        if pa.observer in got:
            raise ProtocolError(f"duplicate peer analysis from {pa.observer}")
        got.add(pa.observer)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        raise ProtocolError(f"peer analyses mismatch: missing={missing} unexpected={extra}")

    if log is not None:
        log.append(
            EventKind.SELF_ANALYSIS_RECORDED,
            Visibility.private(statement.speaker),
            {
                "statement": statement.id,
                "speaker": statement.speaker,
                "deceptive": self_a.deceptive,
                "confidence": self_a.confidence,
                "dtype": self_a.dtype.value,
                "reasoning": self_a.reasoning,
            },
        )
        for pa in peers:
            log.append(
                EventKind.PEER_ANALYSIS_RECORDED,
                Visibility.private(pa.observer),
                {
                    "statement": statement.id,
                    "speaker": statement.speaker,
                    "observer": pa.observer,
                    "deceptive": pa.deceptive,
                    "confidence": pa.confidence,
                    "dtype_guess": pa.dtype_guess.value,
                    "suspicion": pa.suspicion,
                    "reasoning": pa.reasoning,
                },
            )
    for pa in peers:
        before = D[pa.observer, statement.speaker]
        updated = update_suspicion(D, pa.observer, statement.speaker, pa.suspicion, alpha)
        if log is not None:
            log.append(
                EventKind.SUSPICION_UPDATED,
                Visibility.private(pa.observer),
                {
                    "statement": statement.id,
                    "observer": pa.observer,
                    "target": statement.speaker,
                    "previous": before,
                    "value": updated[pa.observer, statement.speaker],
                },
            )
        D = updated
    return D


def suspicion_trajectory(records: Iterable, observer: str, target: str) -> list[tuple[str, float]]:
    """Post-update D values for one (observer, target) pair, in event order."""
    out = []
    for rec in records:
        kind = rec.kind if hasattr(rec, "kind") else rec["kind"]
        if str(getattr(kind, "value", kind)) != "SuspicionUpdated":
            continue
        p = rec.payload if hasattr(rec, "payload") else rec["payload"]
        if p["observer"] == observer and p["target"] == target:
            out.append((p["statement"], p["value"]))
    return out
