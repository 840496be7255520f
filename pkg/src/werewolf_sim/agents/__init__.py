from werewolf_sim.agents.backends import BackendKind, GatewayBackend, MockBackend
from werewolf_sim.agents.context import (
    AgentContext,
    AgentDecision,
    AgentView,
    BidValue,
    DecisionKind,
    NightAction,
    NightRole,
    Request,
    Utterance,
    VoteChoice,
)
from werewolf_sim.agents.gateway import GatewayClient, GatewayConfig, RawModelOutput, gateway_decide
from werewolf_sim.agents.mock import mock_analyze, mock_decide
from werewolf_sim.agents.prompts import build_prompt, role_fact
from werewolf_sim.agents.repair import Repaired, decision_to_payload, repair_output

__all__ = [
    "AgentContext",
    "AgentDecision",
    "AgentView",
    "BackendKind",
    "BidValue",
    "DecisionKind",
    "GatewayBackend",
    "GatewayClient",
    "GatewayConfig",
    "MockBackend",
    "NightAction",
    "NightRole",
    "RawModelOutput",
    "Repaired",
    "Request",
    "Utterance",
    "VoteChoice",
    "build_prompt",
    "decision_to_payload",
    "gateway_decide",
    "mock_analyze",
    "mock_decide",
    "repair_output",
    "role_fact",
]
