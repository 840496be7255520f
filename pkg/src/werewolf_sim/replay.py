"""Rebuild game state and suspicion matrix by folding a log from scratch."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Iterable

from werewolf_sim.deception import SuspicionMatrix, smooth
from werewolf_sim.errors import ReplayError
from werewolf_sim.eventlog import EventKind, EventRecord, read_log
from werewolf_sim.game import Faction, GameConfig, GameState, Phase, Player, Role
from werewolf_sim.schema import record_errors


@dataclass
class ReplayResult:
    state: GameState | None
    matrix: SuspicionMatrix | None
    last_seq: int = 0
    complete: bool = False
    aborted: bool = False
    divergences: list[str] = field(default_factory=list)
    snapshot: dict | None = None
    snapshot_seq: int | None = None


class Replayer:
    def __init__(self) -> None:
        self.state: GameState | None = None
        self.D: SuspicionMatrix | None = None
        self.alpha = 0.7
        self.seq = 0
        self.scores: dict[tuple[str, str], float] = {}
        self.result = ReplayResult(None, None)

    def _need_state(self, rec: EventRecord) -> GameState:
        if self.state is None:
            raise ReplayError(f"{rec.kind.value} before GameStarted", rec.seq)
        return self.state

    def _kill(self, rec: EventRecord, pid: str) -> None:
        p = self._need_state(rec).player(pid)
        if not p.alive:
            raise ReplayError(f"{pid} eliminated twice", rec.seq)
        p.alive = False

    def apply(self, rec: EventRecord) -> None:
        if rec.seq != self.seq + 1:
            raise ReplayError(f"seq gap: expected {self.seq + 1}, found {rec.seq}", rec.seq)
        problems = record_errors(rec.to_dict())
        if problems:
            raise ReplayError("schema violation: " + "; ".join(problems), rec.seq)
        self.seq = rec.seq
        p, k = rec.payload, rec.kind
        if k is EventKind.GAME_STARTED:
            config = GameConfig.from_dict(p["config"])
            self.alpha = config.alpha
            players = [Player(pl["id"], pl["name"], None) for pl in p["players"]]  # roles follow
            self.state = GameState(config=config, players=players)
            self.D = SuspicionMatrix.initial([pl.id for pl in players])
        elif k is EventKind.ROLE_ASSIGNED:
            self._need_state(rec).player(p["player"]).role = Role(p["role"])
        elif k is EventKind.NIGHT_ACTIONS_RESOLVED:
            if p["view"] == "full" and p["eliminated"] is not None:
                self._kill(rec, p["eliminated"])
        elif k is EventKind.EXILE_RESOLVED:
            if p["exiled"] is not None:
                self._kill(rec, p["exiled"])
        elif k is EventKind.PHASE_ADVANCED:
            st = self._need_state(rec)
            if p["from"] != st.phase.value:
                raise ReplayError(f"phase advance from {p['from']} while in {st.phase.value}", rec.seq)
            st.phase, st.round = Phase(p["to"]), p["round"]
            st.winner = None if p["winner"] is None else Faction(p["winner"])
        elif k is EventKind.PEER_ANALYSIS_RECORDED:
            self.scores[p["statement"], p["observer"]] = p["suspicion"]
        elif k is EventKind.SUSPICION_UPDATED:
            self._need_state(rec)
            pair = (p["observer"], p["target"])
            if pair not in self.D:
                raise ReplayError(f"unknown suspicion pair {pair}", rec.seq)
            s = self.scores.get((p["statement"], p["observer"]))
            if s is None:
                raise ReplayError(f"suspicion update without a peer analysis for {pair}", rec.seq)
            value = smooth(self.D[pair], s, self.alpha)
            if value != p["value"]:
                self.result.divergences.append(
                    f"SuspicionMatrix[{pair[0]},{pair[1]}] at seq {rec.seq}: replay {value!r} != logged {p['value']!r}"
                )
            self.D = self.D.with_value(*pair, value)
        elif k is EventKind.STATE_SNAPSHOT:
            self.result.snapshot, self.result.snapshot_seq = p, rec.seq
        elif k is EventKind.VICTORY_DECLARED:
            st = self._need_state(rec)
            if st.winner is None or st.winner.value != p["winner"]:
                raise ReplayError(f"victory for {p['winner']} disagrees with replayed winner {st.winner}", rec.seq)
            self.result.complete = True
        elif k is EventKind.GAME_ABORTED:
            self.result.aborted = True

    def finish(self) -> ReplayResult:
        self.result.state, self.result.matrix, self.result.last_seq = self.state, self.D, self.seq
        return self.result


def replay_records(records: Iterable[EventRecord]) -> ReplayResult:
    r = Replayer()
    for rec in records:
        r.apply(rec)
    return r.finish()


def replay(records: Iterable[EventRecord]) -> tuple[GameState, SuspicionMatrix]:
    """Pure fold over ``records``; raises ReplayError naming the offending seq."""
    result = replay_records(records)
    if result.state is None:
        raise ReplayError("log contains no GameStarted record")
    return result.state, result.matrix


def first_divergence(result: ReplayResult) -> str | None:
    """First field where the replay disagrees with the log's own records, or None."""
    if result.divergences:
        return result.divergences[0]
    snap = result.snapshot
    if snap is None:
        return "StateSnapshot: log has no snapshot to compare against"
    replayed = result.state.to_dict()
    for key in ("round", "phase", "winner"):
        if replayed[key] != snap["state"][key]:
            return f"GameState.{key}: replay {replayed[key]!r} != snapshot {snap['state'][key]!r}"
    for mine, theirs in zip(replayed["players"], snap["state"]["players"]):
        if mine != theirs:
            return f"GameState.players[{mine['id']}]: replay {mine} != snapshot {theirs}"
    if len(replayed["players"]) != len(snap["state"]["players"]):
        return "GameState.players: roster size differs"
    logged = {(o, t): v for o, t, v in snap["suspicion"]}
    for pair, value in sorted(result.matrix.items()):
        if logged.get(pair) != value:
            return f"SuspicionMatrix[{pair[0]},{pair[1]}]: replay {value!r} != snapshot {logged.get(pair)!r}"
    if len(logged) != len(result.matrix):
        return "SuspicionMatrix: entry count differs from snapshot"
    return None


def replay_file(path: str | os.PathLike) -> tuple[ReplayResult, list[tuple[int, str]], bool]:
    """Replay a log file; returns (result, malformed lines, trailing partial line)."""
    parsed = read_log(path)
    if parsed.bad_lines:
        lineno, err = parsed.bad_lines[0]
        raise ReplayError(f"malformed line {lineno}: {err}")
    return replay_records(parsed.records), parsed.bad_lines, parsed.trailing_partial
