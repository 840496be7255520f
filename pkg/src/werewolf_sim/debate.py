"""Debate turn scheduling: integer bids, mention-biased tie-breaking, overbid decay."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import groupby
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from werewolf_sim.errors import ProtocolError

if TYPE_CHECKING:
    from werewolf_sim.deception import Statement
    from werewolf_sim.game import Player

MIN_BID = 0
MAX_BID = 10


@dataclass(frozen=True)
class Bid:
    player: str
    value: int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, int) or not MIN_BID <= self.value <= MAX_BID:
            raise ProtocolError(f"bid must be an integer in [0, 10], got {self.value!r}")


@dataclass
class InfluenceLedger:
    """Per-player credibility multiplier; starts at 1.0 and only ever decays."""

    credibility: dict[str, float] = field(default_factory=dict)
    threshold: int = 8
    multiplier: float = 0.8
    floor: float = 0.25

    @classmethod
    def for_players(cls, ids: Iterable[str], **kwargs) -> InfluenceLedger:
        return cls(credibility={pid: 1.0 for pid in ids}, **kwargs)

    def get(self, pid: str) -> float:
        return self.credibility.get(pid, 1.0)

    def copy(self) -> InfluenceLedger:
        return InfluenceLedger(dict(self.credibility), self.threshold, self.multiplier, self.floor)


def extract_mentions(previous: Statement | str | None, players: Sequence[Player]) -> dict[str, int]:
    """Count case-insensitive occurrences of each living player's display name."""
    text = previous if isinstance(previous, str) or previous is None else previous.text
    text = (text or "").lower()
    return {p.id: (text.count(p.display_name.lower()) if text else 0) for p in players if p.alive}


def effective_bid(bid: Bid, ledger: InfluenceLedger) -> float:
    return bid.value * ledger.get(bid.player)


def order_speakers(
    bids: Iterable[Bid],
    ledger: InfluenceLedger,
    mentions: Mapping[str, int],
    rng: random.Random,
) -> list[str]:
    """Descending effective bid; ties go to the more-mentioned player, then a seeded shuffle."""
    bids = list(bids)
    seen: set[str] = set()
    for b in bids:
        if b.player in seen:
            raise ProtocolError(f"duplicate bid from {b.player}")
        seen.add(b.player)

    # Shuffle once in a canonical order so the outcome depends only on inputs and rng state.
    keyed = sorted(bids, key=lambda b: b.player)
    rng.shuffle(keyed)
    jitter = {b.player: i for i, b in enumerate(keyed)}

    def key(b: Bid) -> tuple[float, int]:
        return (-effective_bid(b, ledger), -mentions.get(b.player, 0))

    ordered = sorted(bids, key=lambda b: (*key(b), jitter[b.player]))
    return [b.player for b in ordered]


def tie_groups(bids: Iterable[Bid], ledger: InfluenceLedger) -> list[list[str]]:
    """Players grouped by identical effective bid, highest first."""
    ordered = sorted(bids, key=lambda b: -effective_bid(b, ledger))
    return [[b.player for b in grp] for _, grp in groupby(ordered, key=lambda b: effective_bid(b, ledger))]


def apply_overbid_decay(ledger: InfluenceLedger, speaker: str, bid_value: int) -> InfluenceLedger:
    """Return a ledger where a speaker who won the floor with a bid >= threshold lost credibility."""
    out = ledger.copy()
    if bid_value >= ledger.threshold:
        out.credibility[speaker] = max(ledger.floor, ledger.get(speaker) * ledger.multiplier)
    return out
