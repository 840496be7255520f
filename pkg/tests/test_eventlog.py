from __future__ import annotations

import json
import re
from collections import Counter
from pathlib import Path

import pytest

from werewolf_sim.agents.backends import MockBackend
from werewolf_sim.engine import play_game
from werewolf_sim.errors import LogIntegrityError, ReplayError
from werewolf_sim.eventlog import (
    EventKind,
    EventRecord,
    LogWriter,
    Visibility,
    dumps,
    mask_wall_time,
    read_log,
)
from werewolf_sim.game import GameConfig, Role
from werewolf_sim.replay import first_divergence, replay, replay_file, replay_records
from werewolf_sim.schema import record_errors, validate_dir, validate_file


def _records(path: Path) -> list[EventRecord]:
    return read_log(path).records


def _game_files(run_dir: Path) -> list[Path]:
    return sorted(run_dir.glob("g*.ndjson"))


# --- envelope and writer ----------------------------------------------------


def test_envelope_key_order_and_round_trip():
    w = LogWriter("g1", clock=lambda: "2026-01-01T00:00:00.000000Z")
    rec = w.append(EventKind.GAME_ABORTED, Visibility.RESEARCHER, {"reason": "x", "error": "y"})
    line = rec.to_json()
    assert list(json.loads(line)) == ["game_id", "seq", "wall_time", "kind", "visibility", "payload"]
    assert EventRecord.from_dict(json.loads(line)) == rec
    assert "\n" not in line


def test_float_round_trip_is_exact():
    for x in (0.1, 0.7 * 0.9 + 0.3 * 0.5, 1 / 3, 0.9865000000000002):
        assert json.loads(dumps({"x": x}))["x"] == x


def test_writer_rejects_out_of_order_records():
    w = LogWriter("g1")
    rec = EventRecord("g1", 2, "t", EventKind.GAME_ABORTED, Visibility.RESEARCHER, {})
    with pytest.raises(LogIntegrityError):
        w.append_record(rec)
    with pytest.raises(LogIntegrityError):
        w.append_record(EventRecord("other", 1, "t", EventKind.GAME_ABORTED, Visibility.RESEARCHER, {}))


def test_writer_flushes_each_record(tmp_path):
    path = tmp_path / "g.ndjson"
    w = LogWriter("g", path)
    w.append(EventKind.GAME_ABORTED, Visibility.RESEARCHER, {"reason": "a", "error": "b"})
    assert path.read_text().count("\n") == 1  # visible before close
    w.close()


@pytest.mark.parametrize(
    "vis,pid,role,seen",
    [
        ("public", "p1", Role.VILLAGER, True),
        ("researcher", "p1", Role.WEREWOLF, False),
        ("role:Werewolf", "p1", Role.WEREWOLF, True),
        ("role:Werewolf", "p1", Role.SEER, False),
        ("private:p1", "p1", Role.VILLAGER, True),
        ("private:p1", "p2", Role.VILLAGER, False),
    ],
)
def test_visibility(vis, pid, role, seen):
    assert Visibility.visible_to(vis, pid, role) is seen


# --- engine output ------------------------------------------------------------


def test_game_start_records(mock_run):
    recs = _records(mock_run / "g0000.ndjson")
    assert (recs[0].seq, recs[0].kind) == (1, EventKind.GAME_STARTED)
    roles = [r for r in recs if r.kind is EventKind.ROLE_ASSIGNED]
    assert len(roles) == 8 and all(r.visibility == "researcher" for r in roles)
    pack = [r for r in recs if r.kind is EventKind.PACK_FORMED]
    assert len(pack) == 1 and pack[0].visibility == "role:Werewolf"


def test_logs_are_schema_clean(mock_run):
    count, violations = validate_dir(mock_run)
    assert count == 20 and violations == []


def test_snapshots_and_victory(mock_run):
    for f in _game_files(mock_run):
        recs = _records(f)
        snaps = [r for r in recs if r.kind is EventKind.STATE_SNAPSHOT]
        victory = recs[-1]
        assert victory.kind is EventKind.VICTORY_DECLARED
        completed_rounds = sum(1 for r in recs if r.kind is EventKind.EXILE_RESOLVED)
        assert len(snaps) >= completed_rounds + 1
        assert snaps[-1].payload["state"]["winner"] == victory.payload["winner"]


def test_raw_output_precedes_its_consequence(mock_run):
    recs = _records(mock_run / "g0001.ndjson")
    for i, r in enumerate(recs):
        if r.kind is EventKind.PROMPT_ISSUED:
            assert recs[i + 1].kind is EventKind.RAW_OUTPUT
            assert recs[i + 1].payload["player"] == r.payload["player"]
        if r.kind is EventKind.STATEMENT_MADE:
            before = [x for x in recs[:i] if x.kind is EventKind.RAW_OUTPUT]
            assert before[-1].payload["request_kind"] == "utterance"


def test_mock_replies_need_no_repair(mock_run):
    for f in _game_files(mock_run):
        assert not any(r.kind is EventKind.REPAIR_APPLIED for r in _records(f))


def test_public_night_view_hides_private_fields(mock_run):
    recs = _records(mock_run / "g0002.ndjson")
    holder = {r.payload["role"]: r.payload["player"] for r in recs if r.kind is EventKind.ROLE_ASSIGNED}
    expected = {
        "full": "researcher",
        "public": "public",
        "werewolf": "role:Werewolf",
        "doctor": f"private:{holder['Doctor']}",
        "seer": f"private:{holder['Seer']}",
    }
    for r in recs:
        if r.kind is EventKind.NIGHT_ACTIONS_RESOLVED:
            view = r.payload["view"]
            assert r.visibility == expected[view]
            if view == "public":
                assert set(r.payload) == {"round", "view", "eliminated"}


def test_dead_players_never_named_by_mock(mock_run):
    for f in _game_files(mock_run):
        recs = _records(f)
        names = {p["id"]: p["name"] for p in recs[0].payload["players"]}
        dead: set[str] = set()
        for r in recs:
            if r.kind is EventKind.NIGHT_ACTIONS_RESOLVED and r.payload["view"] == "full" and r.payload["eliminated"]:
                dead.add(r.payload["eliminated"])
            elif r.kind is EventKind.EXILE_RESOLVED and r.payload["exiled"]:
                dead.add(r.payload["exiled"])
            elif r.kind is EventKind.STATEMENT_MADE:
                for pid in dead:
                    assert not re.search(rf"\b{names[pid]}\b", r.payload["text"])


def test_rerun_is_byte_identical_after_masking(tmp_path):
    def lines(path):
        with LogWriter("g0000", path) as w:
            play_game(GameConfig(seed=42), w, MockBackend())
        return [mask_wall_time(x) for x in path.read_text().splitlines()]

    assert lines(tmp_path / "a.ndjson") == lines(tmp_path / "b.ndjson")


def test_round_cap_ends_undecided(tmp_path):
    w = LogWriter("g")
    # with one round the wolves cannot reach parity from 2 vs 6 (one kill, at most one exile)
    result = play_game(GameConfig(seed=3, max_rounds=1), w, MockBackend())
    if result.winner.value == "None":
        assert result.rounds == 1
        assert w.records[-1].payload == {"winner": "None", "round": 1}


# --- replay ---------------------------------------------------------------------


def test_replay_matches_live_snapshot(mock_run):
    for f in _game_files(mock_run):
        result, bad, partial = replay_file(f)
        assert not bad and not partial and result.complete
        assert first_divergence(result) is None


def test_replay_is_deterministic(mock_run):
    recs = _records(mock_run / "g0003.ndjson")
    a, b = replay(recs), replay(recs)
    assert a[0].to_dict() == b[0].to_dict() and a[1] == b[1]


def test_replay_of_truncated_prefix(mock_run):
    recs = _records(mock_run / "g0000.ndjson")
    cut = len(recs) // 2
    result = replay_records(recs[:cut])
    assert result.last_seq == cut and not result.complete
    assert result.state is not None


def test_replay_rejects_gap(mock_run):
    recs = _records(mock_run / "g0000.ndjson")
    with pytest.raises(ReplayError) as exc:
        replay(recs[:10] + recs[11:])
    assert exc.value.seq == 12


def test_replay_detects_edited_suspicion(mock_run, tmp_path):
    lines = (mock_run / "g0000.ndjson").read_text().splitlines(keepends=True)
    idx = next(i for i, l in enumerate(lines) if '"kind":"SuspicionUpdated"' in l)
    obj = json.loads(lines[idx])
    obj["payload"]["value"] = 0.123
    lines[idx] = dumps(obj) + "\n"
    path = tmp_path / "edited.ndjson"
    path.write_text("".join(lines))
    result, _, _ = replay_file(path)
    assert first_divergence(result).startswith("SuspicionMatrix[")


# --- schema validator -----------------------------------------------------------


def test_record_errors_flag_bad_payload():
    rec = {"game_id": "g", "seq": 1, "wall_time": "2026-01-01T00:00:00Z", "kind": "SuspicionUpdated", "visibility": "private:p1",
           "payload": {"statement": "s1", "observer": "p1", "target": "p2", "previous": 0.5, "value": 1.5}}
    assert any("value" in e for e in record_errors(rec))
    rec["visibility"] = "everyone"
    assert record_errors(rec)


def test_validator_malformed_line(mock_run, tmp_path):
    lines = (mock_run / "g0000.ndjson").read_text().splitlines(keepends=True)
    lines.insert(5, "{not json\n")
    path = tmp_path / "bad.ndjson"
    path.write_text("".join(lines))
    violations = validate_file(path)
    assert len(violations) == 1
    assert str(violations[0]).startswith(f"{path}:6: malformed JSON")


def test_validator_gap(mock_run, tmp_path):
    lines = (mock_run / "g0000.ndjson").read_text().splitlines(keepends=True)
    del lines[9]
    path = tmp_path / "gap.ndjson"
    path.write_text("".join(lines))
    messages = [str(v) for v in validate_file(path)]
    assert messages == [f"{path}:10: seq gap: expected seq 10, found 11"]


def test_validator_truncated(mock_run, tmp_path):
    text = (mock_run / "g0000.ndjson").read_text()
    path = tmp_path / "cut.ndjson"
    path.write_text(text[: len(text) // 2])
    messages = Counter(str(v).split(": ", 1)[1].split(":")[0] for v in validate_file(path))
    assert any("unterminated" in m for m in messages)
