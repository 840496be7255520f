"""Game loop: drives agents through the phase machine, logging every step first."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass

from werewolf_sim.agents.backends import MockBackend
from werewolf_sim.agents.context import AgentView, DecisionKind, NightRole, Request
from werewolf_sim.agents.prompts import build_prompt
from werewolf_sim.agents.repair import repair_output
from werewolf_sim.debate import Bid, InfluenceLedger, apply_overbid_decay, effective_bid, extract_mentions, order_speakers
from werewolf_sim.deception import Statement, SuspicionMatrix, record_statement_round
from werewolf_sim.errors import BackendError
from werewolf_sim.eventlog import EventKind, LogWriter, Visibility
from werewolf_sim.game import (
    Faction,
    GameConfig,
    GameState,
    NightActions,
    Phase,
    Role,
    Vote,
    advance_phase,
    apply_night_outcome,
    new_game,
    next_phase,
    night_outcome,
    tally_votes,
    vote_counts,
)
from werewolf_sim.seeding import rng_for

log = logging.getLogger(__name__)


@dataclass
class GameResult:
    game_id: str
    seed: int
    winner: Faction | None
    rounds: int
    statements: int
    aborted: bool = False
    error: str | None = None

    def summary(self) -> str:
        if self.aborted:
            return f"{self.game_id} seed={self.seed} ABORTED: {self.error}"
        winner = self.winner.value if self.winner is not None else "?"
        return f"{self.game_id} seed={self.seed} winner={winner} rounds={self.rounds} statements={self.statements}"


class Game:
    def __init__(self, config: GameConfig, writer: LogWriter, backend=None, *, mode: str = "mock") -> None:
        self.config = config
        self.writer = writer
        self.backend = backend if backend is not None else MockBackend()
        self.mode = mode
        self.state: GameState = new_game(config)
        self.D = SuspicionMatrix.initial([p.id for p in self.state.players])
        self.ledger = InfluenceLedger.for_players(
            [p.id for p in self.state.players],
            threshold=config.overbid_threshold,
            multiplier=config.overbid_multiplier,
            floor=config.credibility_floor,
        )
        self.views = {
            p.id: AgentView(p.id, p.role, config.history_window) for p in self.state.players
        }
        self.names = {p.display_name.lower(): p.id for p in self.state.players}
        self.order_rng = rng_for(config.seed, "speaker-order")
        self.statements = 0
        writer.listeners.append(self._broadcast)

    def _broadcast(self, rec) -> None:
        for view in self.views.values():
            view.observe(rec)

    # -- agent calls -------------------------------------------------------

    def decide(self, pid: str, request: Request):
        ctx = self.views[pid].context()
        prompt = build_prompt(ctx, request)
        self.writer.append(
            EventKind.PROMPT_ISSUED,
            Visibility.RESEARCHER,
            {
                "player": pid,
                "request": request.to_dict(),
                "prompt": prompt if self.writer.log_prompts else None,
                "prompt_sha256": hashlib.sha256(prompt.encode("utf-8")).hexdigest(),
            },
        )
        tag = f"{self.writer.game_id}/{self.writer.last_seq}"
        raw = self.backend.respond(ctx, request, prompt, seed=self.config.seed, tag=tag)
        self.writer.append(
            EventKind.RAW_OUTPUT,
            Visibility.RESEARCHER,
            {"player": pid, "request_kind": request.kind.value, "text": raw},
        )
        fixed = repair_output(raw, request, player=pid, names=self.names)
        if fixed.defaulted:
            self.writer.append(
                EventKind.REPAIR_APPLIED,
                Visibility.RESEARCHER,
                {"player": pid, "request_kind": request.kind.value, "defaulted": list(fixed.defaulted)},
            )
        return fixed.decision

    # -- phases ------------------------------------------------------------

    def start(self) -> None:
        st = self.state
        self.writer.append(
            EventKind.GAME_STARTED,
            Visibility.PUBLIC,
            {
                "game_id": self.writer.game_id,
                "seed": self.config.seed,
                "mode": self.mode,
                "config": self.config.to_dict(),
                "players": [{"id": p.id, "name": p.display_name} for p in st.players],
            },
        )
        for p in st.players:
            self.writer.append(EventKind.ROLE_ASSIGNED, Visibility.RESEARCHER, {"player": p.id, "role": p.role.value})
        pack = [p.id for p in st.players if p.role is Role.WEREWOLF]
        self.writer.append(EventKind.PACK_FORMED, Visibility.role(Role.WEREWOLF), {"pack": pack})

    def advance(self) -> None:
        st = self.state
        phase, rnd, winner = next_phase(st)
        self.writer.append(
            EventKind.PHASE_ADVANCED,
            Visibility.PUBLIC,
            {"from": st.phase.value, "to": phase.value, "round": rnd, "winner": winner.value if winner else None},
        )
        advance_phase(st)
        if st.phase is Phase.ENDED:
            self.snapshot()
            self.writer.append(
                EventKind.VICTORY_DECLARED, Visibility.PUBLIC, {"winner": st.winner.value, "round": st.round}
            )

    def snapshot(self) -> None:
        self.writer.append(
            EventKind.STATE_SNAPSHOT,
            Visibility.RESEARCHER,
            {
                "state": self.state.to_dict(),
                "suspicion": self.D.to_list(),
                "credibility": dict(sorted(self.ledger.credibility.items())),
            },
        )

    def night(self) -> None:
        st = self.state
        living = st.living_ids()
        wolves = st.living_with(Role.WEREWOLF)
        prey = [p.id for p in st.living if p.role is not Role.WEREWOLF]
        proposals = {}
        for w in wolves:
            req = Request(DecisionKind.NIGHT_ACTION, tuple(prey), night_role=NightRole.KILL)
            proposals[w.id] = self.decide(w.id, req).target
        # the wolf created first wins a disagreement
        wolf_target = proposals[wolves[0].id] if wolves else None

        doctor_protect = seer_target = None
        doctors = st.living_with(Role.DOCTOR)
        if doctors:
            req = Request(DecisionKind.NIGHT_ACTION, tuple(living), night_role=NightRole.PROTECT)
            doctor_protect = self.decide(doctors[0].id, req).target
        seers = st.living_with(Role.SEER)
        if seers:
            pool = tuple(p for p in living if p != seers[0].id)
            req = Request(DecisionKind.NIGHT_ACTION, pool, night_role=NightRole.INSPECT)
            seer_target = self.decide(seers[0].id, req).target

        actions = NightActions(wolf_target, doctor_protect, seer_target)
        out = night_outcome(st, actions)
        seer_role = out.seer_learned[1].value if out.seer_learned else None
        base = {"round": st.round}
        self.writer.append(
            EventKind.NIGHT_ACTIONS_RESOLVED,
            Visibility.RESEARCHER,
            {
                **base,
                "view": "full",
                "wolf_proposals": proposals,
                "wolf_target": wolf_target,
                "doctor_protect": doctor_protect,
                "seer_target": seer_target,
                "seer_role": seer_role,
                "eliminated": out.eliminated,
                "protected_save": out.protected_save,
            },
        )
        if wolves:
            self.writer.append(
                EventKind.NIGHT_ACTIONS_RESOLVED,
                Visibility.role(Role.WEREWOLF),
                {**base, "view": "werewolf", "wolf_proposals": proposals, "wolf_target": wolf_target},
            )
        if doctors:
            self.writer.append(
                EventKind.NIGHT_ACTIONS_RESOLVED,
                Visibility.private(doctors[0].id),
                {**base, "view": "doctor", "doctor_protect": doctor_protect},
            )
        if seers:
            self.writer.append(
                EventKind.NIGHT_ACTIONS_RESOLVED,
                Visibility.private(seers[0].id),
                {**base, "view": "seer", "seer_target": seer_target, "seer_role": seer_role},
            )
        self.writer.append(
            EventKind.NIGHT_ACTIONS_RESOLVED, Visibility.PUBLIC, {**base, "view": "public", "eliminated": out.eliminated}
        )
        apply_night_outcome(st, out)
        self.advance()

    def debate(self) -> None:
        st = self.state
        cfg = self.config
        spoken: dict[str, int] = {}
        previous: Statement | None = None
        for turn in range(cfg.max_debate_turns_per_day):
            eligible = [p.id for p in st.living if spoken.get(p.id, 0) < cfg.max_turns_per_player_per_day]
            if not eligible:
                break
            bids = [Bid(pid, self.decide(pid, Request(DecisionKind.BID, turn=turn)).value) for pid in eligible]
            mentions = extract_mentions(previous, st.players)
            order = order_speakers(bids, self.ledger, mentions, self.order_rng)
            speaker = order[0]
            speaker_bid = next(b.value for b in bids if b.player == speaker)
            decayed = apply_overbid_decay(self.ledger, speaker, speaker_bid)
            self.writer.append(
                EventKind.BIDS_COLLECTED,
                Visibility.PUBLIC,
                {
                    "round": st.round,
                    "turn": turn,
                    "bids": {b.player: b.value for b in bids},
                    "effective": {b.player: effective_bid(b, self.ledger) for b in bids},
                    "mentions": {k: v for k, v in mentions.items() if k in eligible},
                    "order": order,
                    "speaker": speaker,
                    "speaker_bid": speaker_bid,
                    "credibility_after": decayed.get(speaker),
                },
            )
            self.ledger = decayed

            utter = self.decide(speaker, Request(DecisionKind.UTTERANCE, turn=turn))
            self.statements += 1
            stmt = Statement(f"s{self.statements:04d}", speaker, st.round, Phase.DAY_DEBATE, turn, utter.text)
            if utter.scratchpad:
                self.writer.append(
                    EventKind.SCRATCHPAD_APPENDED,
                    Visibility.private(speaker),
                    {"player": speaker, "round": st.round, "turn": turn, "text": utter.scratchpad},
                )
            self.writer.append(EventKind.STATEMENT_MADE, Visibility.PUBLIC, stmt.to_dict())

            self_a = self.decide(speaker, Request(DecisionKind.SELF_ANALYSIS, statement=stmt, turn=turn))
            observers = [p.id for p in st.living if p.id != speaker]
            peers = [
                self.decide(o, Request(DecisionKind.PEER_ANALYSIS, statement=stmt, turn=turn)) for o in observers
            ]
            self.D = record_statement_round(
                stmt, self_a, peers, self.D, observers=observers, alpha=cfg.alpha, log=self.writer
            )
            spoken[speaker] = spoken.get(speaker, 0) + 1
            previous = stmt
        self.advance()

    def vote(self) -> None:
        st = self.state
        living = st.living_ids()
        votes = []
        for pid in living:
            pool = tuple(p for p in living if p != pid)
            votes.append(Vote(pid, self.decide(pid, Request(DecisionKind.VOTE, pool)).target))
        exiled = tally_votes(votes, living)
        self.writer.append(
            EventKind.VOTES_CAST,
            Visibility.PUBLIC,
            {"round": st.round, "votes": [{"voter": v.voter, "target": v.target} for v in votes]},
        )
        self.writer.append(
            EventKind.EXILE_RESOLVED,
            Visibility.PUBLIC,
            {"round": st.round, "exiled": exiled, "tally": dict(sorted(vote_counts(votes).items()))},
        )
        if exiled is not None:
            st.player(exiled).alive = False
        self.snapshot()
        self.advance()

    def run(self) -> GameResult:
        handlers = {Phase.NIGHT: self.night, Phase.DAY_DEBATE: self.debate, Phase.DAY_VOTE: self.vote}
        try:
            self.start()
            while self.state.phase is not Phase.ENDED:
                handlers[self.state.phase]()
        except (BackendError, OSError) as exc:
            log.error("game %s aborted: %s", self.writer.game_id, exc)
            try:
                self.writer.append(
                    EventKind.GAME_ABORTED,
                    Visibility.RESEARCHER,
                    {"reason": type(exc).__name__, "error": str(exc), "round": self.state.round},
                )
            except OSError:
                pass
            return GameResult(
                self.writer.game_id, self.config.seed, None, self.state.round, self.statements, True, str(exc)
            )
        finally:
            self.writer.listeners.remove(self._broadcast)
        return GameResult(self.writer.game_id, self.config.seed, self.state.winner, self.state.round, self.statements)


def play_game(config: GameConfig, writer: LogWriter, backend=None, *, mode: str = "mock") -> GameResult:
    return Game(config, writer, backend, mode=mode).run()
