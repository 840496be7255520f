"""Run many isolated games and write their logs plus a run manifest."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from werewolf_sim.agents.backends import GatewayBackend, MockBackend
from werewolf_sim.agents.gateway import GatewayClient, GatewayConfig
from werewolf_sim.config import RunSpec, config_hash, public_backend_settings
from werewolf_sim.engine import GameResult, play_game
from werewolf_sim.errors import ConfigError
from werewolf_sim.eventlog import LogWriter
from werewolf_sim.metrics.loader import MANIFEST

log = logging.getLogger(__name__)


def prepare_run_dir(spec: RunSpec) -> Path:
    out = spec.out_dir
    if out.exists() and not out.is_dir():
        raise ConfigError(f"{out} exists and is not a directory")
    if out.exists() and any(out.iterdir()):
        if not spec.overwrite:
            raise ConfigError(f"{out} is not empty; pass --overwrite to replace the run inside it")
    run_dir = out / spec.resolved_run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    if spec.overwrite:
        for stale in list(run_dir.glob("*.ndjson")) + [run_dir / MANIFEST]:
            if stale.is_file():
                stale.unlink()
    return run_dir


def make_backend(spec: RunSpec):
    if spec.mode == "mock":
        return MockBackend(), None
    client = GatewayClient(GatewayConfig.resolve(spec.backend))
    return GatewayBackend(client), client


def run_games(spec: RunSpec) -> tuple[Path, list[GameResult]]:
    """Play ``spec.games`` games; per-game seeds are ``seed + index`` whatever the parallelism."""
    # resolve the backend first so a bad llm configuration fails before anything is written
    backend, client = make_backend(spec)
    run_dir = prepare_run_dir(spec)

    def one(index: int) -> GameResult:
        game_id = f"g{index:04d}"
        writer = LogWriter(game_id, run_dir / f"{game_id}.ndjson", fsync=spec.fsync, log_prompts=spec.log_prompts)
        try:
            return play_game(spec.game_config(index), writer, backend, mode=spec.mode)
        finally:
            writer.close()

    try:
        if spec.parallelism == 1:
            results = [one(i) for i in range(spec.games)]
        else:
            with ThreadPoolExecutor(max_workers=spec.parallelism) as pool:
                results = list(pool.map(one, range(spec.games)))
    finally:
        if client is not None:
            client.close()

    manifest = {
        "run_id": spec.resolved_run_id,
        "mode": spec.mode,
        "seed": spec.seed,
        "config_hash": config_hash(spec),
        "config": {k: v for k, v in spec.game.to_dict().items() if k != "seed"},
        "backend": public_backend_settings(spec.backend) if spec.mode == "llm" else {},
        "log_prompts": spec.log_prompts,
        "games": [
            {
                "game_id": r.game_id,
                "seed": r.seed,
                "file": f"{r.game_id}.ndjson",
                "status": "aborted" if r.aborted else "completed",
                "winner": None if r.winner is None else r.winner.value,
                "rounds": r.rounds,
                "statements": r.statements,
            }
            for r in results
        ],
    }
    (run_dir / MANIFEST).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return run_dir, results
