"""What an agent is allowed to know, derived purely from the log records it may see."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Union

from werewolf_sim.deception import INITIAL_SUSPICION, PeerAnalysis, SelfAnalysis, Statement
from werewolf_sim.eventlog import EventKind, EventRecord, Visibility
from werewolf_sim.game import Role


class DecisionKind(str, enum.Enum):
    NIGHT_ACTION = "night_action"
    BID = "bid"
    UTTERANCE = "utterance"
    SELF_ANALYSIS = "self_analysis"
    PEER_ANALYSIS = "peer_analysis"
    VOTE = "vote"


class NightRole(str, enum.Enum):
    KILL = "kill"
    PROTECT = "protect"
    INSPECT = "inspect"


@dataclass(frozen=True)
class Request:
    kind: DecisionKind
    candidates: tuple[str, ...] = ()
    statement: Statement | None = None
    night_role: NightRole | None = None
    turn: int = 0

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value, "turn": self.turn}
        if self.candidates:
            d["candidates"] = list(self.candidates)
        if self.statement is not None:
            d["statement"] = self.statement.id
        if self.night_role is not None:
            d["night_role"] = self.night_role.value
        return d


@dataclass(frozen=True)
class NightAction:
    target: str


@dataclass(frozen=True)
class BidValue:
    value: int


@dataclass(frozen=True)
class Utterance:
    text: str
    scratchpad: str = ""


@dataclass(frozen=True)
class VoteChoice:
    target: str | None


AgentDecision = Union[NightAction, BidValue, Utterance, SelfAnalysis, PeerAnalysis, VoteChoice]

DECISION_TYPES = {
    DecisionKind.NIGHT_ACTION: NightAction,
    DecisionKind.BID: BidValue,
    DecisionKind.UTTERANCE: Utterance,
    DecisionKind.SELF_ANALYSIS: SelfAnalysis,
    DecisionKind.PEER_ANALYSIS: PeerAnalysis,
    DecisionKind.VOTE: VoteChoice,
}


@dataclass(frozen=True)
class AgentContext:
    player_id: str
    name: str
    role: Role
    round: int
    phase: str
    roster: tuple[tuple[str, str, bool], ...]  # (id, display name, alive); no roles
    history: tuple[str, ...]
    scratchpad: tuple[str, ...]
    pack: tuple[str, ...]  # werewolf partners (wolves only)
    seer_results: tuple[tuple[str, str], ...]  # (target id, role) (seer only)
    protections: tuple[tuple[int, str], ...]  # (round, target id) (doctor only)
    suspicion_row: tuple[tuple[str, float], ...]

    def name_of(self, pid: str) -> str:
        for i, name, _ in self.roster:
            if i == pid:
                return name
        return pid

    def living(self) -> list[str]:
        return [i for i, _, alive in self.roster if alive]


@dataclass
class AgentView:
    """Incremental fold over the records visible to one player."""

    player_id: str
    role: Role
    window: int = 12
    name: str = ""
    round: int = 1
    phase: str = "Night"
    roster: dict[str, list] = field(default_factory=dict)
    history: list[str] = field(default_factory=list)
    scratchpad: list[str] = field(default_factory=list)
    pack: list[str] = field(default_factory=list)
    seer_results: list[tuple[str, str]] = field(default_factory=list)
    protections: list[tuple[int, str]] = field(default_factory=list)
    row: dict[str, float] = field(default_factory=dict)

    @classmethod
    def from_records(cls, records: Iterable[EventRecord], player_id: str, role: Role, window: int = 12) -> AgentView:
        view = cls(player_id, role, window)
        for rec in records:
            view.observe(rec)
        return view

    def _name(self, pid: str | None) -> str:
        if pid is None:
            return "nobody"
        entry = self.roster.get(pid)
        return entry[0] if entry else pid

    def observe(self, rec: EventRecord) -> None:
        if not Visibility.visible_to(rec.visibility, self.player_id, self.role):
            return
        p = rec.payload
        k = rec.kind
        if k is EventKind.GAME_STARTED:
            self.roster = {pl["id"]: [pl["name"], True] for pl in p["players"]}
            self.name = self.roster[self.player_id][0]
            self.row = {pid: INITIAL_SUSPICION for pid in self.roster if pid != self.player_id}
            self.window = int(p["config"].get("history_window", self.window))
        elif k is EventKind.PACK_FORMED:
            self.pack = [w for w in p["pack"] if w != self.player_id]
        elif k is EventKind.NIGHT_ACTIONS_RESOLVED:
            view = p["view"]
            if view == "public":
                dead = p.get("eliminated")
                if dead is None:
                    self.history.append(f"Night {p['round']}: nobody died.")
                else:
                    self.roster[dead][1] = False
                    self.history.append(f"Night {p['round']}: {self._name(dead)} was found dead.")
            elif view == "seer":
                self.seer_results.append((p["seer_target"], p["seer_role"]))
            elif view == "doctor":
                self.protections.append((p["round"], p["doctor_protect"]))
        elif k is EventKind.PHASE_ADVANCED:
            self.round, self.phase = p["round"], p["to"]
        elif k is EventKind.STATEMENT_MADE:
            self.history.append(f"Day {p['round']}, {self._name(p['speaker'])}: {p['text']}")
        elif k is EventKind.VOTES_CAST:
            parts = [f"{self._name(v['voter'])}->{self._name(v['target']) if v['target'] else 'abstain'}" for v in p["votes"]]
            self.history.append(f"Day {p['round']} votes: " + ", ".join(parts))
        elif k is EventKind.EXILE_RESOLVED:
            if p["exiled"] is None:
                self.history.append(f"Day {p['round']}: no majority, nobody was exiled.")
            else:
                self.roster[p["exiled"]][1] = False
                self.history.append(f"Day {p['round']}: {self._name(p['exiled'])} was exiled.")
        elif k is EventKind.SCRATCHPAD_APPENDED:
            if p["player"] == self.player_id:
                self.scratchpad.append(p["text"])
        elif k is EventKind.SUSPICION_UPDATED:
            if p["observer"] == self.player_id:
                self.row[p["target"]] = p["value"]

    def context(self) -> AgentContext:
        return AgentContext(
            player_id=self.player_id,
            name=self.name,
            role=self.role,
            round=self.round,
            phase=self.phase,
            roster=tuple((pid, v[0], v[1]) for pid, v in self.roster.items()),
            history=tuple(self.history[-self.window:]),
            scratchpad=tuple(self.scratchpad[-self.window:]),
            pack=tuple(self.pack),
            seer_results=tuple(self.seer_results),
            protections=tuple(self.protections),
            suspicion_row=tuple(sorted(self.row.items())),
        )
