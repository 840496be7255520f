"""Strict parsing of structured agent replies, with conservative per-field defaults."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Any, Mapping

from werewolf_sim.agents.context import (
    AgentDecision,
    BidValue,
    DecisionKind,
    NightAction,
    Request,
    Utterance,
    VoteChoice,
)
from werewolf_sim.deception import DeceptionType, PeerAnalysis, SelfAnalysis

UNPARSEABLE = "[unparseable]"
SILENT = "(silent)"
_ABSTAIN = {"abstain", "null", "none", "nobody", ""}
_OBJECT = re.compile(r"\{.*\}", re.DOTALL)


@dataclass(frozen=True)
class Repaired:
    decision: AgentDecision
    defaulted: tuple[str, ...] = field(default=())

    @property
    def repaired(self) -> bool:
        return bool(self.defaulted)


def decision_to_payload(decision: AgentDecision) -> dict[str, Any]:
    """Structured reply that ``repair_output`` parses back into ``decision`` unchanged."""
    if isinstance(decision, NightAction):
        return {"target": decision.target}
    if isinstance(decision, BidValue):
        return {"bid": decision.value}
    if isinstance(decision, Utterance):
        return {"text": decision.text, "scratchpad": decision.scratchpad}
    if isinstance(decision, VoteChoice):
        return {"target": decision.target}
    if isinstance(decision, SelfAnalysis):
        return {
            "deceptive": decision.deceptive,
            "confidence": decision.confidence,
            "type": decision.dtype.value,
            "reasoning": decision.reasoning,
        }
    if isinstance(decision, PeerAnalysis):
        return {
            "deceptive": decision.deceptive,
            "confidence": decision.confidence,
            "type": decision.dtype_guess.value,
            "suspicion": decision.suspicion,
            "reasoning": decision.reasoning,
        }
    raise TypeError(f"not a decision: {decision!r}")


def _load_object(raw: str) -> dict | None:
    try:
        obj = json.loads(raw)
    except (ValueError, TypeError):
        m = _OBJECT.search(raw or "")
        if m is None:
            return None
        try:
            obj = json.loads(m.group(0))
        except ValueError:
            return None
    return obj if isinstance(obj, dict) else None


def _unit(value: Any) -> float | None:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return None
    value = float(value)
    return value if math.isfinite(value) and 0.0 <= value <= 1.0 else None


def _flag(value: Any) -> int | None:
    if value is True or value is False:
        return int(value)
    if isinstance(value, (int, float)) and value in (0, 1):
        return int(value)
    return None


def _dtype(value: Any) -> DeceptionType | None:
    try:
        return DeceptionType(str(value).strip().lower())
    except ValueError:
        return None


def _resolve_target(value: Any, request: Request, names: Mapping[str, str]) -> str | None:
    if not isinstance(value, str):
        return None
    v = value.strip()
    if v in request.candidates:
        return v
    pid = names.get(v.lower())
    return pid if pid in request.candidates else None


def _first_line(raw: str) -> str | None:
    for line in (raw or "").splitlines():
        if line.strip():
            return line.strip()
    return None


def repair_output(
    raw: str,
    request: Request,
    *,
    player: str = "",
    names: Mapping[str, str] | None = None,
) -> Repaired:
    """Parse ``raw`` for ``request``; every field that fails falls back to its default.

    ``names`` maps lower-cased display names to player ids so replies may name
    targets either way. Total: never raises on model output.
    """
    names = names or {}
    obj = _load_object(raw)
    data = obj if obj is not None else {}
    bad: list[str] = []
    kind = request.kind

    if kind is DecisionKind.BID:
        value = data.get("bid")
        if isinstance(value, str) and value.strip().isdigit():
            value = int(value.strip())
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int) or not 0 <= value <= 10:
            bad.append("bid")
            value = 0
        return Repaired(BidValue(value), tuple(bad))

    if kind is DecisionKind.VOTE:
        value = data.get("target")
        if value is None and "target" in data:
            return Repaired(VoteChoice(None))
        if isinstance(value, str) and value.strip().lower() in _ABSTAIN:
            return Repaired(VoteChoice(None))
        target = _resolve_target(value, request, names)
        if target is None:
            bad.append("target")
        return Repaired(VoteChoice(target), tuple(bad))

    if kind is DecisionKind.NIGHT_ACTION:
        target = _resolve_target(data.get("target"), request, names)
        if target is None:
            bad.append("target")
            target = request.candidates[0]
        return Repaired(NightAction(target), tuple(bad))

    if kind is DecisionKind.UTTERANCE:
        text = data.get("text")
        if not isinstance(text, str) or not text.strip():
            bad.append("text")
            text = (_first_line(raw) if obj is None else None) or SILENT
        scratch = data.get("scratchpad", "")
        if not isinstance(scratch, str):
            bad.append("scratchpad")
            scratch = ""
        return Repaired(Utterance(" ".join(text.split()), scratch), tuple(bad))

    statement = request.statement.id if request.statement is not None else ""
    deceptive = _flag(data.get("deceptive"))
    if deceptive is None:
        bad.append("deceptive")
        deceptive = 0
    confidence = _unit(data.get("confidence"))
    if confidence is None:
        bad.append("confidence")
        confidence = 0.5
    dtype = _dtype(data.get("type"))
    if dtype is None:
        bad.append("type")
        dtype = DeceptionType.NONE
    reasoning = data.get("reasoning")
    if not isinstance(reasoning, str):
        bad.append("reasoning")
        reasoning = UNPARSEABLE

    if kind is DecisionKind.SELF_ANALYSIS:
        if (deceptive == 0) != (dtype is DeceptionType.NONE):
            # inconsistent label pair: fall back to the honest default for both
            bad += [f for f in ("deceptive", "type") if f not in bad]
            deceptive, dtype = 0, DeceptionType.NONE
        return Repaired(SelfAnalysis(statement, deceptive, confidence, dtype, reasoning), tuple(bad))

    suspicion = _unit(data.get("suspicion"))
    if suspicion is None:
        bad.append("suspicion")
        suspicion = 0.5
    return Repaired(
        PeerAnalysis(statement, player, deceptive, confidence, dtype, suspicion, reasoning), tuple(bad)
    )
