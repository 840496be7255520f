"""Backends turn a prompt into raw reply text; one backend serves a whole game."""

from __future__ import annotations

import enum

from werewolf_sim.agents.context import AgentContext, Request
from werewolf_sim.agents.gateway import GatewayClient
from werewolf_sim.agents.mock import mock_decide
from werewolf_sim.agents.repair import decision_to_payload
from werewolf_sim.eventlog import dumps
from werewolf_sim.seeding import rng_for


class BackendKind(str, enum.Enum):
    MOCK = "mock"
    MODEL_GATEWAY = "llm"


class MockBackend:
    kind = BackendKind.MOCK

    def respond(self, ctx: AgentContext, request: Request, prompt: str, *, seed: int, tag: str = "") -> str:
        statement = request.statement.id if request.statement is not None else ""
        rng = rng_for(seed, "mock", ctx.player_id, ctx.round, request.kind.value, request.turn, statement)
        return dumps(decision_to_payload(mock_decide(ctx, request, rng)))


class GatewayBackend:
    kind = BackendKind.MODEL_GATEWAY

    def __init__(self, client: GatewayClient) -> None:
        self.client = client

    def respond(self, ctx: AgentContext, request: Request, prompt: str, *, seed: int, tag: str = "") -> str:
        text, _ = self.client.complete(prompt, tag=tag)
        return text
