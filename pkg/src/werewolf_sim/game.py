"""Roles, phase state machine, night resolution, voting and victory rules."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from werewolf_sim.errors import ConfigError, ProtocolError, RuleViolation, StateError
from werewolf_sim.seeding import MASK64, rng_for


class Role(str, enum.Enum):
    VILLAGER = "Villager"
    WEREWOLF = "Werewolf"
    SEER = "Seer"
    DOCTOR = "Doctor"


class Faction(str, enum.Enum):
    VILLAGERS = "Villagers"
    WEREWOLVES = "Werewolves"
    NONE = "None"  # game hit the round cap undecided


class Phase(str, enum.Enum):
    NIGHT = "Night"
    DAY_DEBATE = "DayDebate"
    DAY_VOTE = "DayVote"
    ENDED = "Ended"


DEFAULT_ROSTER: dict[Role, int] = {
    Role.VILLAGER: 4,
    Role.WEREWOLF: 2,
    Role.SEER: 1,
    Role.DOCTOR: 1,
}

DEFAULT_NAMES = ("Emma", "Raj", "Lena", "Omar", "Sofia", "Kenji", "Maya", "Diego")


@dataclass(frozen=True)
class GameConfig:
    seed: int = 0
    roster_counts: Mapping[Role, int] = field(default_factory=lambda: dict(DEFAULT_ROSTER))
    alpha: float = 0.7
    max_rounds: int = 10
    max_debate_turns_per_day: int = 8
    max_turns_per_player_per_day: int = 2
    names: tuple[str, ...] = DEFAULT_NAMES
    # overbid decay; arbitrary constants, see debate.apply_overbid_decay
    overbid_threshold: int = 8
    overbid_multiplier: float = 0.8
    credibility_floor: float = 0.25
    history_window: int = 12

    def validate(self) -> None:
        counts = {Role(k): int(v) for k, v in self.roster_counts.items()}
        if counts != DEFAULT_ROSTER:
            raise ConfigError(
                "roster must be exactly 4 Villager, 2 Werewolf, 1 Seer, 1 Doctor; "
                f"got {({r.value: n for r, n in counts.items()})}"
            )
        if not 0.0 < self.alpha <= 1.0:
            raise ConfigError(f"alpha must lie in (0, 1], got {self.alpha}")
        for name in ("max_rounds", "max_debate_turns_per_day", "max_turns_per_player_per_day", "history_window"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if len(self.names) != sum(counts.values()) or len(set(n.lower() for n in self.names)) != len(self.names):
            raise ConfigError("need one distinct display name per player")
        if not 0.0 < self.credibility_floor <= 1.0 or not 0.0 < self.overbid_multiplier <= 1.0:
            raise ConfigError("credibility floor and overbid multiplier must lie in (0, 1]")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "roster_counts": {Role(k).value: int(v) for k, v in self.roster_counts.items()},
            "alpha": self.alpha,
            "max_rounds": self.max_rounds,
            "max_debate_turns_per_day": self.max_debate_turns_per_day,
            "max_turns_per_player_per_day": self.max_turns_per_player_per_day,
            "names": list(self.names),
            "overbid_threshold": self.overbid_threshold,
            "overbid_multiplier": self.overbid_multiplier,
            "credibility_floor": self.credibility_floor,
            "history_window": self.history_window,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> GameConfig:
        data = dict(data)
        if "roster_counts" in data:
            data["roster_counts"] = {Role(k): int(v) for k, v in data["roster_counts"].items()}
        if "names" in data:
            data["names"] = tuple(data["names"])
        return cls(**data)


@dataclass
class Player:
    id: str
    display_name: str
    role: Role
    alive: bool = True

    @property
    def is_wolf(self) -> bool:
        return self.role is Role.WEREWOLF


@dataclass(frozen=True)
class NightActions:
    wolf_target: str | None
    doctor_protect: str | None = None
    seer_target: str | None = None


@dataclass(frozen=True)
class NightOutcome:
    eliminated: str | None
    protected_save: bool
    seer_learned: tuple[str, Role] | None  # private to the Seer


@dataclass(frozen=True)
class Vote:
    voter: str
    target: str | None = None  # None = abstain


@dataclass
class GameState:
    config: GameConfig
    players: list[Player]
    round: int = 1
    phase: Phase = Phase.NIGHT
    winner: Faction | None = None

    def player(self, pid: str) -> Player:
        for p in self.players:
            if p.id == pid:
                return p
        raise RuleViolation(f"unknown player {pid!r}")

    def index_of(self, pid: str) -> int:
        for i, p in enumerate(self.players):
            if p.id == pid:
                return i
        raise RuleViolation(f"unknown player {pid!r}")

    @property
    def living(self) -> list[Player]:
        return [p for p in self.players if p.alive]

    def living_ids(self) -> list[str]:
        return [p.id for p in self.players if p.alive]

    def living_with(self, role: Role) -> list[Player]:
        return [p for p in self.players if p.alive and p.role is role]

    def to_dict(self) -> dict:
        return {
            "round": self.round,
            "phase": self.phase.value,
            "winner": None if self.winner is None else self.winner.value,
            "players": [
                {"id": p.id, "name": p.display_name, "role": p.role.value, "alive": p.alive}
                for p in self.players
            ],
        }


def new_game(config: GameConfig) -> GameState:
    """Create the eight-player roster with roles from a seeded shuffle of the fixed multiset."""
    config.validate()
    roles = [role for role, n in DEFAULT_ROSTER.items() for _ in range(n)]
    rng_for(config.seed, "roles").shuffle(roles)
    players = [
        Player(id=f"p{i + 1}", display_name=name, role=role)
        for i, (name, role) in enumerate(zip(config.names, roles))
    ]
    return GameState(config=config, players=players)


def _require_living(state: GameState, pid: str, what: str) -> Player:
    try:
        p = state.player(pid)
    except RuleViolation:
        raise RuleViolation(f"{what}: unknown player {pid!r}") from None
    if not p.alive:
        raise RuleViolation(f"{what}: {pid} is dead")
    return p


def night_outcome(state: GameState, actions: NightActions) -> NightOutcome:
    """Validate ``actions`` and compute the outcome without touching ``state``."""
    if state.phase is not Phase.NIGHT:
        raise StateError(f"night resolution requested during {state.phase.value}")
    wolves_alive = bool(state.living_with(Role.WEREWOLF))
    if actions.wolf_target is not None:
        if not wolves_alive:
            raise RuleViolation("wolf target given but no werewolf is alive")
        if _require_living(state, actions.wolf_target, "wolf target").is_wolf:
            raise RuleViolation("werewolves cannot target a werewolf")
    elif wolves_alive:
        raise RuleViolation("living werewolves must choose a target")
    if actions.doctor_protect is not None:
        if not state.living_with(Role.DOCTOR):
            raise RuleViolation("protection given but the doctor is dead")
        _require_living(state, actions.doctor_protect, "doctor protect")
    seer_learned = None
    if actions.seer_target is not None:
        seers = state.living_with(Role.SEER)
        if not seers:
            raise RuleViolation("inspection given but the seer is dead")
        target = _require_living(state, actions.seer_target, "seer target")
        if target.id == seers[0].id:
            raise RuleViolation("the seer cannot inspect themself")
        seer_learned = (target.id, target.role)

    saved = actions.wolf_target is not None and actions.doctor_protect == actions.wolf_target
    eliminated = None if saved else actions.wolf_target
    return NightOutcome(eliminated=eliminated, protected_save=saved, seer_learned=seer_learned)


def apply_night_outcome(state: GameState, outcome: NightOutcome) -> None:
    if outcome.eliminated is not None:
        state.player(outcome.eliminated).alive = False


def resolve_night(state: GameState, actions: NightActions) -> NightOutcome:
    """Resolve the simultaneous night actions and apply the elimination."""
    outcome = night_outcome(state, actions)
    apply_night_outcome(state, outcome)
    return outcome


def tally_votes(votes: Iterable[Vote], living: Iterable[str]) -> str | None:
    """Return the exiled player, or None when no target has a strict majority of the living."""
    living = set(living)
    seen: set[str] = set()
    counts: Counter[str] = Counter()
    for v in votes:
        if v.voter in seen:
            raise ProtocolError(f"duplicate vote from {v.voter}")
        seen.add(v.voter)
        if v.voter not in living:
            raise RuleViolation(f"dead or unknown voter {v.voter}")
        if v.target is None:
            continue
        if v.target not in living or v.target == v.voter:
            raise RuleViolation(f"illegal vote {v.voter} -> {v.target}")
        counts[v.target] += 1
    for target, n in counts.items():
        if 2 * n > len(living):
            return target
    return None


def vote_counts(votes: Iterable[Vote]) -> dict[str, int]:
    return dict(Counter(v.target for v in votes if v.target is not None))


def check_victory(state: GameState) -> Faction | None:
    """Winner if the game is decided, ``Faction.NONE`` past the round cap, else None."""
    wolves = len(state.living_with(Role.WEREWOLF))
    others = len(state.living) - wolves
    if wolves == 0:
        return Faction.VILLAGERS
    if wolves >= others:
        return Faction.WEREWOLVES
    if state.round > state.config.max_rounds:
        return Faction.NONE
    return None


def next_phase(state: GameState) -> tuple[Phase, int, Faction | None]:
    """Compute the (phase, round, winner) that ``advance_phase`` would apply."""
    if state.phase is Phase.ENDED:
        raise StateError("game already ended")
    if state.phase is Phase.DAY_DEBATE:
        return Phase.DAY_VOTE, state.round, None
    winner = check_victory(state)
    if winner is not None:
        return Phase.ENDED, state.round, winner
    if state.phase is Phase.NIGHT:
        return Phase.DAY_DEBATE, state.round, None
    if state.round + 1 > state.config.max_rounds:
        return Phase.ENDED, state.round, Faction.NONE
    return Phase.NIGHT, state.round + 1, None


def advance_phase(state: GameState) -> GameState:
    """Apply the legal transition; victory is checked after night and after the vote."""
    phase, rnd, winner = next_phase(state)
    state.phase, state.round, state.winner = phase, rnd, winner
    return state
