"""Deterministic rule-based agent and analyzer used for ablation runs.

Every constant here is arbitrary. The mock exists to exercise the plumbing
(scheduling, smoothing, logging, metrics), not to play well.
"""

from __future__ import annotations

import random

from werewolf_sim.agents.context import (
    AgentContext,
    AgentDecision,
    BidValue,
    DecisionKind,
    NightAction,
    NightRole,
    Request,
    Utterance,
    VoteChoice,
)
from werewolf_sim.deception import DeceptionType, PeerAnalysis, SelfAnalysis, Statement
from werewolf_sim.game import Role
from werewolf_sim.seeding import stable_hash

HEDGE = ("maybe", "perhaps", "not sure", "possibly")
ACCUSE = ("suspect", "suspicious", "lying", "liar", "wolf")
CLAIM = ("i am", "i saw", "i protected", "i investigated")

SEER_REVEAL_RATE = 0.3
DOCTOR_CLAIM_RATE = 0.2
WOLF_CLAIM_RATE = 0.25
# votes go to a seeded pick among the candidates within this margin of the voter's top suspicion
VOTE_MARGIN = 0.05


def has_cue(text: str, lexicon: tuple[str, ...]) -> bool:
    low = text.lower()
    return any(cue in low for cue in lexicon)


def count_cues(text: str, lexicon: tuple[str, ...]) -> int:
    low = text.lower()
    return sum(low.count(cue) for cue in lexicon)


def mock_analyze(statement: Statement, speaker_role: Role | None, observer: str | None = None):
    """Self-analysis when ``observer`` is None (needs the speaker's own role), else peer analysis."""
    text = statement.text
    hedge = has_cue(text, HEDGE)
    if observer is None:
        if speaker_role is Role.WEREWOLF:
            if has_cue(text, CLAIM):
                dtype = DeceptionType.FABRICATION
            elif has_cue(text, ACCUSE):
                dtype = DeceptionType.MISDIRECTION
            else:
                dtype = DeceptionType.OMISSION
            return SelfAnalysis(statement.id, 1, 0.9, dtype, f"mock rule: werewolf, {dtype.value}")
        if hedge:
            return SelfAnalysis(statement.id, 1, 0.6, DeceptionType.OMISSION, "mock rule: hedge cue")
        return SelfAnalysis(statement.id, 0, 0.9, DeceptionType.NONE, "mock rule: no hedge cue")

    accuse = count_cues(text, ACCUSE)
    noise = (stable_hash(text, observer) % 11) / 100
    s = min(1.0, max(0.0, 0.3 + 0.1 * accuse + 0.2 * hedge + noise))
    return PeerAnalysis(
        statement=statement.id,
        observer=observer,
        deceptive=int(s > 0.5),
        confidence=round(0.5 + abs(s - 0.5), 12),
        dtype_guess=DeceptionType.OMISSION if hedge else DeceptionType.NONE,
        suspicion=s,
        reasoning=f"mock rule: accuse={accuse} hedge={int(hedge)}",
    )


def mock_bid(player_id: str, round_: int) -> int:
    return stable_hash(player_id, round_) % 11


def _utterance(ctx: AgentContext, request: Request, rng: random.Random) -> Utterance:
    others = [p for p in ctx.living() if p != ctx.player_id and p not in ctx.pack]
    if not others:
        others = [p for p in ctx.living() if p != ctx.player_id]
    target = rng.choice(others)
    roll = rng.random()
    living = set(ctx.living())
    known = [(t, r) for t, r in ctx.seer_results if t in living]
    guarded = [t for _, t in ctx.protections if t in living and t != ctx.player_id]

    if ctx.role is Role.SEER and known and roll < SEER_REVEAL_RATE:
        t, r = rng.choice(known)
        verdict = "a werewolf" if r == Role.WEREWOLF.value else "not a werewolf"
        text = f"I investigated {ctx.name_of(t)} last night and they are {verdict}."
        target = t
    elif ctx.role is Role.DOCTOR and guarded and roll < DOCTOR_CLAIM_RATE:
        target = rng.choice(guarded)
        text = f"I protected {ctx.name_of(target)} last night."
    elif ctx.role is Role.WEREWOLF and roll < WOLF_CLAIM_RATE:
        text = f"I am a villager, and I trust {ctx.name_of(target)}."
    elif stable_hash(ctx.player_id, ctx.round, request.turn) % 2 == 1:
        text = f"Maybe {ctx.name_of(target)} is lying."
    else:
        text = rng.choice(("I suspect {}.", "I trust {}.")).format(ctx.name_of(target))
    note = f"note {ctx.player_id}/r{ctx.round}/t{request.turn}: watching {ctx.name_of(target)}"
    return Utterance(text, note)


def mock_decide(ctx: AgentContext, request: Request, rng: random.Random) -> AgentDecision:
    """Fully deterministic decision for ``request`` given the context and a seeded stream."""
    kind = request.kind
    if kind is DecisionKind.BID:
        return BidValue(mock_bid(ctx.player_id, ctx.round))
    if kind is DecisionKind.NIGHT_ACTION:
        pool = sorted(request.candidates)
        if request.night_role is NightRole.INSPECT:
            seen = {t for t, _ in ctx.seer_results}
            pool = [c for c in pool if c not in seen] or pool
        return NightAction(rng.choice(pool))
    if kind is DecisionKind.UTTERANCE:
        return _utterance(ctx, request, rng)
    if kind is DecisionKind.SELF_ANALYSIS:
        return mock_analyze(request.statement, ctx.role)
    if kind is DecisionKind.PEER_ANALYSIS:
        return mock_analyze(request.statement, None, observer=ctx.player_id)
    if kind is DecisionKind.VOTE:
        pool = [c for c in sorted(request.candidates) if c not in ctx.pack] or sorted(request.candidates)
        row = dict(ctx.suspicion_row)
        top = max(row.get(c, 0.5) for c in pool)
        return VoteChoice(rng.choice([c for c in pool if row.get(c, 0.5) >= top - VOTE_MARGIN]))
    raise ValueError(f"unknown decision kind {kind}")
