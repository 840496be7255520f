from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from werewolf_sim.deception import (
    DeceptionType,
    PeerAnalysis,
    SelfAnalysis,
    Statement,
    SuspicionMatrix,
    record_statement_round,
    smooth,
    suspicion_trajectory,
    update_suspicion,
)
from werewolf_sim.errors import ProtocolError
from werewolf_sim.eventlog import EventKind, LogWriter
from werewolf_sim.game import Phase

IDS = [f"p{i}" for i in range(1, 9)]
unit = st.floats(0, 1, allow_nan=False)


def _stmt(sid: str = "s0001", speaker: str = "p1") -> Statement:
    return Statement(sid, speaker, 1, Phase.DAY_DEBATE, 0, "hello")


def _peers(stmt: Statement, observers, s: float = 0.5):
    return [PeerAnalysis(stmt.id, o, int(s > 0.5), 0.5, DeceptionType.NONE, s) for o in observers]


def _honest(stmt: Statement) -> SelfAnalysis:
    return SelfAnalysis(stmt.id, 0, 0.9, DeceptionType.NONE)


def test_update_examples():
    D = SuspicionMatrix.initial(IDS)
    assert update_suspicion(D, "p1", "p2", 1.0, 0.7)["p1", "p2"] == pytest.approx(0.85)
    for _ in range(3):
        D = update_suspicion(D, "p1", "p2", 1.0, 0.7)
    assert D["p1", "p2"] == pytest.approx(0.9865)
    assert D["p2", "p1"] == 0.5


@given(unit, st.floats(0.01, 1))
def test_fixed_point(x, alpha):
    assert smooth(x, x, alpha) == pytest.approx(x, abs=1e-15)


@given(unit, unit, st.floats(0.01, 1))
def test_update_stays_in_unit_interval_between_inputs(d, s, alpha):
    v = smooth(d, s, alpha)
    assert min(d, s) - 1e-15 <= v <= max(d, s) + 1e-15


@pytest.mark.parametrize("s,alpha", [(1.5, 0.7), (-0.1, 0.7), (0.5, 0.0), (0.5, 1.2), (float("nan"), 0.7)])
def test_update_rejects_bad_inputs(s, alpha):
    with pytest.raises(ValueError):
        update_suspicion(SuspicionMatrix.initial(IDS), "p1", "p2", s, alpha)


def test_update_rejects_self_and_unknown():
    D = SuspicionMatrix.initial(IDS)
    with pytest.raises(ValueError):
        update_suspicion(D, "p1", "p1", 0.5, 0.7)
    with pytest.raises(KeyError):
        update_suspicion(D, "p1", "p99", 0.5, 0.7)


def test_analysis_validation():
    with pytest.raises(ValueError):
        SelfAnalysis("s", 0, 0.5, DeceptionType.OMISSION)
    with pytest.raises(ValueError):
        SelfAnalysis("s", 1, 0.5, DeceptionType.NONE)
    with pytest.raises(ValueError):
        PeerAnalysis("s", "p2", 0, 0.5, DeceptionType.NONE, 1.2)
    with pytest.raises(ValueError):
        PeerAnalysis("s", "p2", 2, 0.5, DeceptionType.NONE, 0.2)


@pytest.mark.parametrize("living", [8, 5])
def test_record_round_counts(living):
    ids = IDS[:living]
    stmt = _stmt()
    w = LogWriter("g")
    record_statement_round(stmt, _honest(stmt), _peers(stmt, ids[1:]), SuspicionMatrix.initial(ids), observers=ids[1:], alpha=0.7, log=w)
    kinds = [r.kind for r in w.records]
    assert kinds.count(EventKind.PEER_ANALYSIS_RECORDED) == living - 1
    assert kinds.count(EventKind.SUSPICION_UPDATED) == living - 1
    assert kinds[0] is EventKind.SELF_ANALYSIS_RECORDED


def test_record_round_two_statements():
    D = SuspicionMatrix.initial(IDS[:3])
    for sid, s in (("s1", 0.8), ("s2", 0.2)):
        stmt = _stmt(sid)
        peers = _peers(stmt, ["p2", "p3"], s)
        D = record_statement_round(stmt, _honest(stmt), peers, D, observers=["p2", "p3"], alpha=0.7)
    assert D["p2", "p1"] == pytest.approx(0.353)


def test_record_round_protocol_errors():
    stmt = _stmt()
    D = SuspicionMatrix.initial(IDS[:3])
    with pytest.raises(ProtocolError):
        record_statement_round(stmt, _honest(stmt), _peers(stmt, ["p2"]), D, observers=["p2", "p3"], alpha=0.7)
    with pytest.raises(ProtocolError):
        record_statement_round(stmt, _honest(stmt), _peers(stmt, ["p2", "p2", "p3"]), D, observers=["p2", "p3"], alpha=0.7)
    with pytest.raises(ProtocolError):
        record_statement_round(stmt, _honest(stmt), _peers(stmt, ["p1", "p2"]), D, observers=["p1", "p2"], alpha=0.7)
    with pytest.raises(ProtocolError):
        record_statement_round(stmt, _honest(_stmt("other")), _peers(stmt, ["p2", "p3"]), D, observers=["p2", "p3"], alpha=0.7)


def test_trajectory():
    w = LogWriter("g")
    assert suspicion_trajectory(w.records, "p2", "p1") == []
    stmt = _stmt()
    record_statement_round(stmt, _honest(stmt), _peers(stmt, ["p2", "p3"], 0.9), SuspicionMatrix.initial(IDS[:3]), observers=["p2", "p3"], alpha=0.7, log=w)
    assert suspicion_trajectory(w.records, "p2", "p1") == [("s0001", pytest.approx(0.78))]
    assert suspicion_trajectory([r.to_dict() for r in w.records], "p3", "p1")[0][0] == "s0001"
    assert suspicion_trajectory(w.records, "p1", "p2") == []


def test_matrix_round_trip():
    D = update_suspicion(SuspicionMatrix.initial(IDS[:4]), "p1", "p2", 0.3, 0.7)
    assert SuspicionMatrix.from_list(D.to_list()) == D
    assert len(D) == 12
    assert ("p1", "p1") not in D
