"""Synthetic game logs with a known suspicion trend, for checking the trend analysis.

Every player survives and speaks once per round. Peer suspicion of a statement is
``base + slope * (round - 1)`` for the speaker's role, plus a per-(game, role, round)
offset and per-judgment noise. The logs go through the normal writer and smoothing
code, so they validate and replay like real runs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from werewolf_sim.deception import (
    DeceptionType,
    PeerAnalysis,
    SelfAnalysis,
    Statement,
    SuspicionMatrix,
    record_statement_round,
)
from werewolf_sim.eventlog import EventKind, LogWriter, Visibility
from werewolf_sim.game import GameConfig, Phase, Role, advance_phase, new_game, next_phase
from werewolf_sim.metrics.loader import MANIFEST
from werewolf_sim.seeding import rng_for


@dataclass(frozen=True)
class TrendModel:
    rounds: int = 8
    base: float = 0.5
    # per-round increase of mean peer suspicion, as a fraction (0.016 = 1.6 pp)
    slopes: dict[str, float] = field(default_factory=lambda: {Role.WEREWOLF.value: 0.016})
    game_sd: float = 0.03
    judgment_sd: float = 0.05

    def mean(self, role: Role, rnd: int) -> float:
        return self.base + self.slopes.get(role.value, 0.0) * (rnd - 1)


def _clip(x: float) -> float:
    return min(1.0, max(0.0, x))


def write_synthetic_game(path: str | os.PathLike, game_id: str, seed: int, model: TrendModel) -> None:
    config = GameConfig(seed=seed, max_rounds=model.rounds)
    state = new_game(config)
    rng = rng_for(seed, "synthetic")
    D = SuspicionMatrix.initial([p.id for p in state.players])
    counter = 0
    with LogWriter(game_id, path) as w:
        w.append(
            EventKind.GAME_STARTED,
            Visibility.PUBLIC,
            {
                "game_id": game_id,
                "seed": seed,
                "mode": "synthetic",
                "config": config.to_dict(),
                "players": [{"id": p.id, "name": p.display_name} for p in state.players],
            },
        )
        for p in state.players:
            w.append(EventKind.ROLE_ASSIGNED, Visibility.RESEARCHER, {"player": p.id, "role": p.role.value})

        def advance() -> None:
            phase, rnd, winner = next_phase(state)
            w.append(
                EventKind.PHASE_ADVANCED,
                Visibility.PUBLIC,
                {"from": state.phase.value, "to": phase.value, "round": rnd, "winner": winner.value if winner else None},
            )
            advance_phase(state)

        while state.phase is not Phase.ENDED:
            if state.phase is Phase.DAY_DEBATE:
                offsets = {role: rng.gauss(0.0, model.game_sd) for role in Role}
                for turn, speaker in enumerate(state.players):
                    counter += 1
                    stmt = Statement(f"s{counter:04d}", speaker.id, state.round, Phase.DAY_DEBATE, turn, "synthetic statement")
                    w.append(EventKind.STATEMENT_MADE, Visibility.PUBLIC, stmt.to_dict())
                    lying = speaker.role is Role.WEREWOLF
                    self_a = SelfAnalysis(
                        stmt.id, int(lying), 1.0, DeceptionType.FABRICATION if lying else DeceptionType.NONE, "synthetic"
                    )
                    observers = [o.id for o in state.players if o.id != speaker.id]
                    centre = model.mean(speaker.role, state.round) + offsets[speaker.role]
                    peers = []
                    for o in observers:
                        s = _clip(rng.gauss(centre, model.judgment_sd))
                        peers.append(
                            PeerAnalysis(stmt.id, o, int(s > 0.5), 0.5 + abs(s - 0.5), DeceptionType.NONE, s, "synthetic")
                        )
                    D = record_statement_round(stmt, self_a, peers, D, observers=observers, alpha=config.alpha, log=w)
            advance()
        w.append(
            EventKind.STATE_SNAPSHOT,
            Visibility.RESEARCHER,
            {"state": state.to_dict(), "suspicion": D.to_list(), "credibility": {p.id: 1.0 for p in state.players}},
        )
        w.append(EventKind.VICTORY_DECLARED, Visibility.PUBLIC, {"winner": state.winner.value, "round": state.round})


def write_synthetic_run(out_dir: str | os.PathLike, games: int = 100, seed: int = 0, model: TrendModel | None = None) -> Path:
    """Write ``games`` synthetic logs plus a manifest; returns the run directory."""
    model = model or TrendModel()
    run_dir = Path(out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for i in range(games):
        game_id = f"g{i:04d}"
        write_synthetic_game(run_dir / f"{game_id}.ndjson", game_id, seed + i, model)
        entries.append({"game_id": game_id, "seed": seed + i, "file": f"{game_id}.ndjson", "status": "completed"})
    manifest = {"run_id": f"run-synthetic-{seed}", "mode": "synthetic", "seed": seed, "games": entries}
    (run_dir / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return run_dir
