"""Flatten game logs into the rows the metric tables aggregate over."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from werewolf_sim.deception import INITIAL_SUSPICION
from werewolf_sim.eventlog import EventKind, EventRecord, read_log

# bulky researcher records the metrics never need
SKIP_KINDS = (EventKind.PROMPT_ISSUED.value, EventKind.RAW_OUTPUT.value)

MANIFEST = "manifest.json"


@dataclass(frozen=True)
class StatementRow:
    id: str
    speaker: str
    speaker_role: str
    round: int
    deceptive: int | None = None
    dtype: str | None = None


@dataclass(frozen=True)
class JudgmentRow:
    statement: str
    observer: str
    observer_role: str
    speaker: str
    speaker_role: str
    round: int
    suspicion: float
    flagged: int
    truth: int  # speaker's own deceptive label


@dataclass
class GameData:
    game_id: str
    seed: int | None = None
    mode: str | None = None
    config: dict = field(default_factory=dict)
    roles: dict[str, str] = field(default_factory=dict)
    statements: list[StatementRow] = field(default_factory=list)
    judgments: list[JudgmentRow] = field(default_factory=list)
    final_suspicion: dict[tuple[str, str], float] = field(default_factory=dict)
    winner: str | None = None
    rounds: int = 0
    complete: bool = False


def game_from_records(records: list[EventRecord]) -> GameData:
    game = GameData(game_id=records[0].game_id if records else "")
    stmts: dict[str, dict] = {}
    selfs: dict[str, dict] = {}
    peers: list[dict] = []
    smoothed: dict[tuple[str, str], float] = {}
    snapshot = None
    for rec in records:
        p = rec.payload
        k = rec.kind
        if k is EventKind.GAME_STARTED:
            game.seed, game.mode, game.config = p["seed"], p["mode"], p["config"]
            ids = [pl["id"] for pl in p["players"]]
            smoothed = {(o, t): INITIAL_SUSPICION for o in ids for t in ids if o != t}
        elif k is EventKind.ROLE_ASSIGNED:
            game.roles[p["player"]] = p["role"]
        elif k is EventKind.STATEMENT_MADE:
            stmts[p["id"]] = p
        elif k is EventKind.SELF_ANALYSIS_RECORDED:
            selfs[p["statement"]] = p
        elif k is EventKind.PEER_ANALYSIS_RECORDED:
            peers.append(p)
        elif k is EventKind.SUSPICION_UPDATED:
            smoothed[p["observer"], p["target"]] = p["value"]
        elif k is EventKind.STATE_SNAPSHOT:
            snapshot = p
        elif k is EventKind.VICTORY_DECLARED:
            game.winner, game.rounds, game.complete = p["winner"], p["round"], True
        elif k is EventKind.PHASE_ADVANCED:
            game.rounds = max(game.rounds, p["round"])

    for sid, s in stmts.items():
        sa = selfs.get(sid)
        game.statements.append(
            StatementRow(
                sid,
                s["speaker"],
                game.roles.get(s["speaker"], "?"),
                s["round"],
                None if sa is None else sa["deceptive"],
                None if sa is None else sa["dtype"],
            )
        )
    for pa in peers:
        st = stmts.get(pa["statement"])
        sa = selfs.get(pa["statement"])
        if st is None or sa is None:
            continue
        game.judgments.append(
            JudgmentRow(
                pa["statement"],
                pa["observer"],
                game.roles.get(pa["observer"], "?"),
                st["speaker"],
                game.roles.get(st["speaker"], "?"),
                st["round"],
                pa["suspicion"],
                pa["deceptive"],
                sa["deceptive"],
            )
        )
    if snapshot is not None and game.complete:
        game.final_suspicion = {(o, t): v for o, t, v in snapshot["suspicion"]}
    else:
        game.final_suspicion = smoothed
    return game


def load_game(path: str | os.PathLike) -> GameData:
    parsed = read_log(path, skip_kinds=SKIP_KINDS)
    return game_from_records(parsed.records)


def find_run_dir(path: str | os.PathLike) -> Path:
    """Accept a run directory, or a directory holding exactly one run directory."""
    path = Path(path)
    if (path / MANIFEST).is_file():
        return path
    if path.is_dir():
        runs = [d for d in sorted(path.iterdir()) if (d / MANIFEST).is_file()]
        if len(runs) == 1:
            return runs[0]
    raise FileNotFoundError(f"no {MANIFEST} found under {path}")


def load_manifest(run_dir: str | os.PathLike) -> dict:
    with open(Path(run_dir) / MANIFEST, encoding="utf-8") as fh:
        return json.load(fh)


def load_run(path: str | os.PathLike) -> tuple[dict, list[GameData]]:
    run_dir = find_run_dir(path)
    manifest = load_manifest(run_dir)
    games = [load_game(run_dir / g["file"]) for g in manifest["games"]]
    games.sort(key=lambda g: g.game_id)
    return manifest, games
