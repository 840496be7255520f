"""JSON Schemas for log records and a line-by-line validator."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from jsonschema import Draft202012Validator

from werewolf_sim.deception import DeceptionType
from werewolf_sim.eventlog import TERMINAL_KINDS, EventKind
from werewolf_sim.game import Faction, Phase, Role

_ROLES = [r.value for r in Role]
_PHASES = [p.value for p in Phase]
_TYPES = [t.value for t in DeceptionType]
_FACTIONS = [f.value for f in Faction]

PID = {"type": "string", "minLength": 1}
OPT_PID = {"type": ["string", "null"]}
UNIT = {"type": "number", "minimum": 0, "maximum": 1}
FLAG = {"type": "integer", "enum": [0, 1]}
COUNT = {"type": "integer", "minimum": 0}
ROUND = {"type": "integer", "minimum": 1}


def _obj(required: dict, optional: dict | None = None) -> dict:
    return {
        "type": "object",
        "required": sorted(required),
        "properties": {**required, **(optional or {})},
        "additionalProperties": False,
    }


ENVELOPE = {
    "type": "object",
    "required": ["game_id", "seq", "wall_time", "kind", "visibility", "payload"],
    "additionalProperties": False,
    "properties": {
        "game_id": {"type": "string", "minLength": 1},
        "seq": {"type": "integer", "minimum": 1},
        "wall_time": {"type": "string", "pattern": r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})?$"},
        "kind": {"enum": [k.value for k in EventKind]},
        "visibility": {"type": "string", "pattern": r"^(public|researcher|role:(" + "|".join(_ROLES) + r")|private:\S+)$"},
        "payload": {"type": "object"},
    },
}

PAYLOADS: dict[str, dict] = {
    "GameStarted": _obj(
        {
            "game_id": {"type": "string"},
            "seed": {"type": "integer", "minimum": 0},
            "mode": {"enum": ["mock", "llm", "synthetic"]},
            "config": {"type": "object", "required": ["alpha", "max_rounds"]},
            "players": {
                "type": "array",
                "minItems": 1,
                "items": _obj({"id": PID, "name": {"type": "string", "minLength": 1}}),
            },
        }
    ),
    "RoleAssigned": _obj({"player": PID, "role": {"enum": _ROLES}}),
    "PackFormed": _obj({"pack": {"type": "array", "items": PID}}),
    "NightActionsResolved": _obj(
        {"round": ROUND, "view": {"enum": ["full", "public", "werewolf", "doctor", "seer"]}},
        {
            "wolf_proposals": {"type": "object", "additionalProperties": PID},
            "wolf_target": OPT_PID,
            "doctor_protect": OPT_PID,
            "seer_target": OPT_PID,
            "seer_role": {"enum": _ROLES + [None]},
            "eliminated": OPT_PID,
            "protected_save": {"type": "boolean"},
        },
    ),
    "BidsCollected": _obj(
        {
            "round": ROUND,
            "turn": COUNT,
            "bids": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0, "maximum": 10}},
            "effective": {"type": "object", "additionalProperties": {"type": "number", "minimum": 0}},
            "mentions": {"type": "object", "additionalProperties": COUNT},
            "order": {"type": "array", "items": PID},
            "speaker": PID,
            "speaker_bid": {"type": "integer", "minimum": 0, "maximum": 10},
            "credibility_after": UNIT,
        }
    ),
    "PromptIssued": _obj(
        {
            "player": PID,
            "request": {"type": "object", "required": ["kind"]},
            "prompt": {"type": ["string", "null"]},
            "prompt_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        }
    ),
    "RawOutput": _obj({"player": PID, "request_kind": {"type": "string"}, "text": {"type": "string"}}),
    "RepairApplied": _obj(
        {"player": PID, "request_kind": {"type": "string"}, "defaulted": {"type": "array", "items": {"type": "string"}}}
    ),
    "StatementMade": _obj(
        {
            "id": PID,
            "speaker": PID,
            "round": ROUND,
            "phase": {"enum": _PHASES},
            "turn_index": COUNT,
            "text": {"type": "string", "minLength": 1},
        }
    ),
    "ScratchpadAppended": _obj({"player": PID, "round": ROUND, "turn": COUNT, "text": {"type": "string"}}),
    "SelfAnalysisRecorded": _obj(
        {
            "statement": PID,
            "speaker": PID,
            "deceptive": FLAG,
            "confidence": UNIT,
            "dtype": {"enum": _TYPES},
            "reasoning": {"type": "string"},
        }
    ),
    "PeerAnalysisRecorded": _obj(
        {
            "statement": PID,
            "speaker": PID,
            "observer": PID,
            "deceptive": FLAG,
            "confidence": UNIT,
            "dtype_guess": {"enum": _TYPES},
            "suspicion": UNIT,
            "reasoning": {"type": "string"},
        }
    ),
    "SuspicionUpdated": _obj({"statement": PID, "observer": PID, "target": PID, "previous": UNIT, "value": UNIT}),
    "VotesCast": _obj(
        {"round": ROUND, "votes": {"type": "array", "items": _obj({"voter": PID, "target": OPT_PID})}}
    ),
    "ExileResolved": _obj(
        {"round": ROUND, "exiled": OPT_PID, "tally": {"type": "object", "additionalProperties": COUNT}}
    ),
    "PhaseAdvanced": _obj(
        {"from": {"enum": _PHASES}, "to": {"enum": _PHASES}, "round": ROUND, "winner": {"enum": _FACTIONS + [None]}}
    ),
    "StateSnapshot": _obj(
        {
            "state": {
                "type": "object",
                "required": ["round", "phase", "winner", "players"],
                "properties": {
                    "round": ROUND,
                    "phase": {"enum": _PHASES},
                    "winner": {"enum": _FACTIONS + [None]},
                    "players": {
                        "type": "array",
                        "items": _obj({"id": PID, "name": {"type": "string"}, "role": {"enum": _ROLES}, "alive": {"type": "boolean"}}),
                    },
                },
            },
            "suspicion": {
                "type": "array",
                "items": {"type": "array", "prefixItems": [PID, PID, UNIT], "minItems": 3, "maxItems": 3},
            },
            "credibility": {"type": "object", "additionalProperties": UNIT},
        }
    ),
    "VictoryDeclared": _obj({"winner": {"enum": _FACTIONS}, "round": ROUND}),
    "GameAborted": _obj({"reason": {"type": "string"}, "error": {"type": "string"}}, {"round": ROUND}),
}

_ENVELOPE_V = Draft202012Validator(ENVELOPE)
_PAYLOAD_V = {k: Draft202012Validator(s) for k, s in PAYLOADS.items()}


def record_errors(obj: object) -> list[str]:
    """Schema problems of one decoded line (envelope first, then payload)."""
    errors = [f"{'/'.join(map(str, e.path)) or '<record>'}: {e.message}" for e in _ENVELOPE_V.iter_errors(obj)]
    if errors:
        return errors
    kind = obj["kind"]
    return [
        f"payload/{'/'.join(map(str, e.path))}: {e.message}" if e.path else f"payload: {e.message}"
        for e in _PAYLOAD_V[kind].iter_errors(obj["payload"])
    ]


@dataclass(frozen=True)
class Violation:
    file: str
    line: int
    message: str

    def __str__(self) -> str:
        return f"{self.file}:{self.line}: {self.message}"


def validate_file(path: str | os.PathLike) -> list[Violation]:
    """Every schema, seq and completeness problem in one game log."""
    path = Path(path)
    out: list[Violation] = []
    expected = 1
    game_id = None
    last_kind = None
    last_line = 0
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            last_line = lineno
            if not raw.strip():
                continue
            if not raw.endswith("\n"):
                out.append(Violation(str(path), lineno, "unterminated final line (truncated write)"))
            try:
                obj = json.loads(raw)
            except ValueError as exc:
                out.append(Violation(str(path), lineno, f"malformed JSON: {exc}"))
                continue
            problems = record_errors(obj)
            if problems:
                out += [Violation(str(path), lineno, p) for p in problems]
                continue
            if obj["seq"] != expected:
                out.append(Violation(str(path), lineno, f"seq gap: expected seq {expected}, found {obj['seq']}"))
            expected = obj["seq"] + 1
            if game_id is None:
                game_id = obj["game_id"]
                if obj["kind"] != EventKind.GAME_STARTED.value:
                    out.append(Violation(str(path), lineno, f"first record must be GameStarted, found {obj['kind']}"))
            elif obj["game_id"] != game_id:
                out.append(Violation(str(path), lineno, f"game_id {obj['game_id']!r} differs from {game_id!r}"))
            last_kind = obj["kind"]
    if last_kind is None:
        out.append(Violation(str(path), max(last_line, 1), "empty log"))
    elif EventKind(last_kind) not in TERMINAL_KINDS:
        out.append(Violation(str(path), last_line, f"log ends with {last_kind}, not VictoryDeclared/GameAborted"))
    return out


def iter_log_files(directory: str | os.PathLike) -> Iterator[Path]:
    yield from sorted(Path(directory).rglob("*.ndjson"))


def validate_dir(directory: str | os.PathLike) -> tuple[int, list[Violation]]:
    """(number of files checked, violations) for every log under ``directory``."""
    files = list(iter_log_files(directory))
    violations: list[Violation] = []
    for f in files:
        violations += validate_file(f)
    return len(files), violations


def schema_document() -> dict:
    return {"envelope": ENVELOPE, "payloads": PAYLOADS}
