"""Acceptance criteria 1-9.

Each test records one PASS/FAIL line (shown in the terminal summary) before asserting.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import random
import statistics
import time
from fractions import Fraction
from pathlib import Path

from conftest import record_acceptance
from werewolf_sim.agents.prompts import role_fact
from werewolf_sim.cli import EXIT_MISMATCH, EXIT_OK, EXIT_PARTIAL, EXIT_SCHEMA, main
from werewolf_sim.deception import SuspicionMatrix, update_suspicion
from werewolf_sim.errors import RuleViolation
from werewolf_sim.eventlog import EventKind, dumps, mask_wall_time, read_log
from werewolf_sim.game import GameConfig, NightActions, Phase, Role, Vote, new_game, night_outcome, tally_votes
from werewolf_sim.metrics.loader import load_run
from werewolf_sim.metrics.report import (
    REFERENCE_COUNTS,
    SECTION_TITLES,
    absent_cells,
    accuracy_footnote,
    build_report,
    figure_csv,
    render_markdown,
)
from werewolf_sim.metrics.scores import auprc, brier, roc_auc, theil_sen
from werewolf_sim.synthetic import write_synthetic_run


def _masked(run_dir: Path) -> dict[str, list[str]]:
    return {f.name: [mask_wall_time(l) for l in f.read_text().splitlines()] for f in sorted(run_dir.glob("*.ndjson"))}


# --- 1. determinism ----------------------------------------------------------------------


def test_c1_determinism(tmp_path):
    start = time.perf_counter()
    runs = []
    for name in ("a", "b"):
        assert main(["run", "--games", "5", "--mode", "mock", "--seed", "42", "--out", str(tmp_path / name)]) == EXIT_OK
        runs.append(tmp_path / name / "run-mock-42")
    codes = [main(["replay", str(f)]) for f in sorted(runs[0].glob("*.ndjson"))]
    elapsed = time.perf_counter() - start
    identical = _masked(runs[0]) == _masked(runs[1])
    ok = identical and codes == [EXIT_OK] * 5 and elapsed < 30.0
    record_acceptance(1, "determinism", ok, f"identical={identical} replay_codes={codes} elapsed={elapsed:.2f}s (< 30s)")
    assert ok


# --- 2. smoothing ---------------------------------------------------------------------------


def test_c2_smoothing():
    rng = random.Random(2)
    alpha = 0.7
    mismatches = 0
    for _ in range(1000):
        d0 = rng.random()
        seq = [rng.random() for _ in range(rng.randint(1, 30))]
        D = SuspicionMatrix({("a", "b"): d0, ("b", "a"): 0.5})
        oracle = d0
        for s in seq:
            D = update_suspicion(D, "a", "b", s, alpha)
            oracle = alpha * s + (1 - alpha) * oracle
            if D["a", "b"] != oracle:  # zero ulp
                mismatches += 1
                break
    worst = 0.0
    for _ in range(1000):
        d0, k, n = rng.random(), rng.random(), rng.randint(1, 40)
        D = SuspicionMatrix({("a", "b"): d0, ("b", "a"): 0.5})
        for _ in range(n):
            D = update_suspicion(D, "a", "b", k, alpha)
        worst = max(worst, abs(abs(D["a", "b"] - k) - 0.3**n * abs(d0 - k)))
    ok = mismatches == 0 and worst <= 1e-12
    record_acceptance(2, "smoothing", ok, f"recurrence mismatches={mismatches}/1000, closed-form max err={worst:.2e} (<= 1e-12)")
    assert ok


# --- 3. metrics against brute-force oracles ------------------------------------------------


def _auc_oracle(pairs):
    pos = [s for s, d in pairs if d == 1]
    neg = [s for s, d in pairs if d == 0]
    if not pos or not neg:
        return None
    wins = sum(Fraction(1) if p > q else Fraction(1, 2) if p == q else Fraction(0) for p in pos for q in neg)
    return float(wins / (len(pos) * len(neg)))


def _ap_oracle(pairs):
    pos = [s for s, d in pairs if d == 1]
    if not pos:
        return None
    total = Fraction(0)
    for s in pos:
        above = [d for t, d in pairs if t >= s]
        total += Fraction(sum(above), len(above))
    return float(total / len(pos))


def _theil_sen_oracle(points):
    slopes = [(b[1] - a[1]) / (b[0] - a[0]) for a, b in itertools.combinations(points, 2) if a[0] != b[0]]
    return statistics.median(slopes) if slopes else None


def _brier_oracle(pairs):
    return sum((s - d) ** 2 for s, d in pairs) / len(pairs)


def test_c3_metrics():
    rng = random.Random(3)
    worst = {"roc_auc": 0.0, "auprc": 0.0, "brier": 0.0}
    theil_bad = 0
    for _ in range(200):
        n = rng.randint(2, 60)
        grid = rng.choice([None, 4, 10])  # coarse grids force ties
        scores = [rng.random() if grid is None else rng.randint(0, grid) / grid for _ in range(n)]
        labels = [rng.randint(0, 1) for _ in range(n)]
        labels[0], labels[1] = 0, 1
        pairs = list(zip(scores, labels))
        worst["roc_auc"] = max(worst["roc_auc"], abs(roc_auc(pairs) - _auc_oracle(pairs)))
        worst["auprc"] = max(worst["auprc"], abs(auprc(pairs) - _ap_oracle(pairs)))
        worst["brier"] = max(worst["brier"], abs(brier(pairs) - _brier_oracle(pairs)))
        xs = [rng.randint(1, 8) for _ in range(n)]
        points = list(zip(xs, scores))
        if theil_sen(points) != _theil_sen_oracle(points):
            theil_bad += 1
    ok = worst["roc_auc"] <= 1e-12 and worst["auprc"] <= 1e-12 and worst["brier"] <= 1e-15 and theil_bad == 0
    detail = ", ".join(f"{k} max err={v:.1e}" for k, v in worst.items()) + f", theil_sen mismatches={theil_bad}"
    record_acceptance(3, "metric oracles", ok, detail)
    assert ok


# --- 4. reference confusion counts -----------------------------------------------------------


def test_c4_reference_confusion(mock_run):
    c = REFERENCE_COUNTS
    manifest, games = load_run(mock_run)
    text = render_markdown(build_report(manifest, games))
    footnote = accuracy_footnote() in text
    ok = abs(c.precision - 0.767) <= 0.001 and abs(c.accuracy - 0.568) <= 0.001 and footnote
    record_acceptance(4, "confusion counts", ok, f"precision={c.precision:.4f} accuracy={c.accuracy:.4f} footnote={footnote}")
    assert ok


# --- 5. trend recovery on synthetic logs -----------------------------------------------------


def test_c5_trend_recovery(tmp_path):
    run_dir = write_synthetic_run(tmp_path, games=100, seed=0)
    manifest, games = load_run(run_dir)
    report = build_report(manifest, games)
    slopes = report["trends"].slopes_pp_per_round
    rows = list(csv.DictReader(io.StringIO(figure_csv(report["trends"]))))
    ci = {(int(r["round"]), r["role"]): (float(r["ci_low"]), float(r["ci_high"])) for r in rows}
    overlap = [
        rnd
        for (rnd, role) in ci
        if role == "Werewolf" and rnd >= 3
        and not (ci[rnd, "Werewolf"][0] > ci[rnd, "Villager"][1] or ci[rnd, "Villager"][0] > ci[rnd, "Werewolf"][1])
    ]
    rounds = sorted(r for r, role in ci if role == "Werewolf" and r >= 3)
    wolf, vill = slopes["Werewolf"], slopes["Villager"]
    ok = abs(wolf - 1.6) <= 0.2 and abs(vill) <= 0.2 and bool(rounds) and not overlap
    record_acceptance(
        5, "trend recovery", ok, f"Werewolf {wolf:.3f} pp/round, Villager {vill:.3f} pp/round, overlapping rounds >= 3: {overlap}"
    )
    assert ok


# --- 6. report completeness ---------------------------------------------------------------------


def test_c6_report_completeness(mock_run, tmp_path):
    out = tmp_path / "report.md"
    code = main(["analyze", str(mock_run), "--out", str(out)])
    text = out.read_text()
    missing = [t for t in SECTION_TITLES.values() if f"## {t}" not in text]
    manifest, games = load_run(mock_run)
    absent = absent_cells(build_report(manifest, games))
    ok = code == EXIT_OK and len(games) >= 20 and not missing and not absent
    record_acceptance(6, "report completeness", ok, f"games={len(games)} missing sections={missing} absent cells={len(absent)}")
    assert ok


# --- 7. information hygiene ------------------------------------------------------------------


def _leaks(path: Path) -> tuple[int, list[str]]:
    records = read_log(path).records
    roles = {r.payload["player"]: r.payload["role"] for r in records if r.kind is EventKind.ROLE_ASSIGNED}
    names = {p["id"]: p["name"] for p in records[0].payload["players"]}
    wolves = {p for p, role in roles.items() if role == "Werewolf"}
    scratch = [(r.payload["player"], r.payload["text"]) for r in records if r.kind is EventKind.SCRATCHPAD_APPENDED]
    learned: set[str] = set()
    problems, prompts = [], 0
    for r in records:
        p = r.payload
        if r.kind is EventKind.NIGHT_ACTIONS_RESOLVED and p["view"] == "full" and p["seer_target"]:
            learned.add(role_fact(names[p["seer_target"]], p["seer_role"]))
        if r.kind is not EventKind.PROMPT_ISSUED:
            continue
        prompts += 1
        pid, text = p["player"], p["prompt"]
        allowed = set()
        if pid in wolves:
            allowed |= {role_fact(names[w], "Werewolf") for w in wolves - {pid}}
        if roles[pid] == "Seer":
            allowed |= learned
        for line in text.splitlines():
            if line.startswith("[known role]") and line not in allowed:
                problems.append(f"{path.name} seq {r.seq}: {pid} sees {line!r}")
        for owner, note in scratch:
            if owner != pid and note in text:
                problems.append(f"{path.name} seq {r.seq}: {pid} sees scratchpad of {owner}")
    return prompts, problems


def test_c7_hygiene(mock_run):
    total, problems = 0, []
    for f in sorted(mock_run.glob("*.ndjson")):
        n, bad = _leaks(f)
        total += n
        problems += bad
    ok = total > 0 and not problems
    record_acceptance(7, "prompt hygiene", ok, f"{total} prompts scanned, {len(problems)} leaks")
    assert ok, problems[:5]


# --- 8. log mutations -------------------------------------------------------------------------


def test_c8_mutations(mock_run, tmp_path, capsys):
    lines = (mock_run / "g0000.ndjson").read_text().splitlines(keepends=True)
    results: dict[str, bool] = {}

    def write(name: str, content: str) -> Path:
        d = tmp_path / name
        d.mkdir()
        path = d / "g0000.ndjson"
        path.write_text(content)
        return path

    # edited value in the final snapshot
    idx = max(i for i, l in enumerate(lines) if '"kind":"StateSnapshot"' in l)
    obj = json.loads(lines[idx])
    o, t, v = obj["payload"]["suspicion"][0]
    obj["payload"]["suspicion"][0] = [o, t, 1.0 if v < 0.5 else 0.0]
    path = write("edited", "".join(lines[:idx] + [dumps(obj) + "\n"] + lines[idx + 1:]))
    capsys.readouterr()
    code = main(["replay", str(path)])
    out = capsys.readouterr().out
    results["edited->6"] = code == EXIT_MISMATCH and f"SuspicionMatrix[{o},{t}]" in out

    # gapped seq
    path = write("gap", "".join(lines[:10] + lines[11:]))
    code_r = main(["replay", str(path)])
    err = capsys.readouterr().err
    code_v = main(["validate", str(path)])
    out = capsys.readouterr().out
    results["gap->5/5"] = code_r == EXIT_SCHEMA and "seq 12" in err and code_v == EXIT_SCHEMA and "expected seq 11, found 12" in out

    # malformed line
    path = write("malformed", "".join(lines[:4] + ["{broken\n"] + lines[4:]))
    code_r = main(["replay", str(path)])
    err = capsys.readouterr().err
    code_v = main(["validate", str(path)])
    out = capsys.readouterr().out
    results["malformed->5"] = code_r == EXIT_SCHEMA and code_v == EXIT_SCHEMA and ":5: malformed JSON" in out and "line 5" in err

    # truncated mid-record
    text = "".join(lines)
    path = write("truncated", text[: len(text) // 2])
    code = main(["replay", str(path)])
    out = capsys.readouterr().out
    results["truncated->7"] = code == EXIT_PARTIAL and "PARTIAL replay through seq" in out

    ok = all(results.values())
    record_acceptance(8, "log mutations", ok, ", ".join(f"{k} {'ok' if v else 'WRONG'}" for k, v in results.items()))
    assert ok


# --- 9. game rules -----------------------------------------------------------------------------


def _tally_oracle(choices: dict[str, str | None], living: list[str]) -> str | None:
    for target in living:
        if sum(1 for c in choices.values() if c == target) * 2 > len(living):
            return target
    return None


def _state_at_night():
    state = new_game(GameConfig(seed=9))
    assert state.phase is Phase.NIGHT
    return state


def test_c9_game_rules():
    tally_cases = tally_bad = 0
    ids = [f"p{i}" for i in range(1, 6)]
    for n in range(1, 6):
        living = ids[:n]
        options = [[None] + [t for t in living if t != v] for v in living]
        for combo in itertools.product(*options):
            votes = [Vote(v, t) for v, t in zip(living, combo)]
            tally_cases += 1
            if tally_votes(votes, living) != _tally_oracle(dict(zip(living, combo)), living):
                tally_bad += 1

    state = _state_at_night()
    night_cases = night_bad = 0
    pids = [p.id for p in state.players]
    for wolf_target, protect in itertools.product(pids, pids):
        night_cases += 1
        target_role = state.player(wolf_target).role
        try:
            out = night_outcome(state, NightActions(wolf_target, protect))
        except RuleViolation:
            night_bad += target_role is not Role.WEREWOLF
            continue
        if target_role is Role.WEREWOLF:
            night_bad += 1
        elif out.eliminated != (None if protect == wolf_target else wolf_target) or out.protected_save != (protect == wolf_target):
            night_bad += 1
    assert all(p.alive for p in state.players)  # night_outcome must not mutate

    ok = tally_bad == 0 and night_bad == 0
    record_acceptance(
        9, "game rules", ok, f"tally {tally_cases} profiles, {tally_bad} wrong; night {night_cases} combinations, {night_bad} wrong"
    )
    assert ok


def test_c7_scanner_catches_planted_leak(mock_run, tmp_path):
    records = read_log(mock_run / "g0000.ndjson").records
    roles = {r.payload["player"]: r.payload["role"] for r in records if r.kind is EventKind.ROLE_ASSIGNED}
    names = {p["id"]: p["name"] for p in records[0].payload["players"]}
    villager = next(p for p, role in roles.items() if role == "Villager")
    wolf = next(p for p, role in roles.items() if role == "Werewolf")
    lines = (mock_run / "g0000.ndjson").read_text().splitlines()
    idx = next(i for i, r in enumerate(records) if r.kind is EventKind.PROMPT_ISSUED and r.payload["player"] == villager)
    obj = json.loads(lines[idx])
    obj["payload"]["prompt"] += "\n" + role_fact(names[wolf], "Werewolf")
    lines[idx] = dumps(obj)
    path = tmp_path / "g0000.ndjson"
    path.write_text("\n".join(lines) + "\n")
    assert len(_leaks(path)[1]) == 1
    assert not _leaks(mock_run / "g0000.ndjson")[1]
