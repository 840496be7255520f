"""Run configuration: TOML file < CLI flags, on top of built-in defaults.

Example file::

    [game]
    alpha = 0.7
    max_rounds = 10
    max_debate_turns_per_day = 8
    max_turns_per_player_per_day = 2

    [backend]                  # llm mode only
    endpoint = "http://localhost:8000/v1/chat/completions"
    api_key_env = "WEREWOLF_SIM_API_KEY"
    timeout = 60
    max_retries = 3

    [logging]
    log_prompts = true
    fsync = false
"""

from __future__ import annotations

import hashlib
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from werewolf_sim.errors import ConfigError
from werewolf_sim.eventlog import dumps
from werewolf_sim.game import GameConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

_GAME_KEYS = {f.name for f in fields(GameConfig)} - {"seed"}


@dataclass(frozen=True)
class RunSpec:
    games: int
    mode: str
    seed: int
    out_dir: Path
    config_file: Path | None = None
    parallelism: int = 1
    overwrite: bool = False
    run_id: str | None = None
    game: GameConfig = field(default_factory=GameConfig)
    backend: dict[str, Any] = field(default_factory=dict)
    log_prompts: bool = True
    fsync: bool = False

    def __post_init__(self) -> None:
        if self.games < 1:
            raise ConfigError("--games must be positive")
        if self.parallelism < 1:
            raise ConfigError("--parallelism must be positive")
        if self.mode not in ("mock", "llm"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def resolved_run_id(self) -> str:
        return self.run_id or f"run-{self.mode}-{self.seed}"

    def game_seed(self, index: int) -> int:
        return (self.seed + index) % 2**64

    def game_config(self, index: int) -> GameConfig:
        return replace(self.game, seed=self.game_seed(index))


def load_config_file(path: str | os.PathLike) -> dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    unknown = set(data) - {"game", "backend", "logging"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    bad = set(data.get("game", {})) - _GAME_KEYS
    if bad:
        raise ConfigError(f"unknown [game] keys: {sorted(bad)}")
    return data


def build_run_spec(
    *,
    games: int,
    mode: str,
    seed: int,
    out_dir: str | os.PathLike,
    config_file: str | os.PathLike | None = None,
    parallelism: int = 1,
    overwrite: bool = False,
    run_id: str | None = None,
    game_overrides: dict[str, Any] | None = None,
    log_prompts: bool | None = None,
) -> RunSpec:
    data = load_config_file(config_file) if config_file else {}
    game_settings = dict(data.get("game", {}))
    game_settings.update({k: v for k, v in (game_overrides or {}).items() if v is not None})
    try:
        game = GameConfig.from_dict(game_settings)
        game.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid game settings: {exc}") from None
    logging_cfg = data.get("logging", {})
    return RunSpec(
        games=games,
        mode=mode,
        seed=seed,
        out_dir=Path(out_dir),
        config_file=Path(config_file) if config_file else None,
        parallelism=parallelism,
        overwrite=overwrite,
        run_id=run_id,
        game=game,
        backend=dict(data.get("backend", {})),
        log_prompts=logging_cfg.get("log_prompts", True) if log_prompts is None else log_prompts,
        fsync=bool(logging_cfg.get("fsync", False)),
    )


def public_backend_settings(settings: dict[str, Any]) -> dict[str, Any]:
    """Backend settings safe to write to disk (no credentials, only the variable name)."""
    return {k: v for k, v in sorted(settings.items()) if k not in ("api_key", "token", "password")}


def config_hash(spec: RunSpec) -> str:
    doc = {
        "mode": spec.mode,
        "game": {k: v for k, v in spec.game.to_dict().items() if k != "seed"},
        "backend": public_backend_settings(spec.backend) if spec.mode == "llm" else {},
    }
    return hashlib.sha256(dumps(doc).encode("utf-8")).hexdigest()
