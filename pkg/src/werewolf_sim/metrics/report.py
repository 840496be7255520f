"""Render every table of a run as markdown, CSV or JSON.

All three formats are generated from one list of cells, so their numbers agree
exactly. A cell with ``n == 0`` has no underlying observations (for example the
Seer-to-Seer cell in a one-Seer roster); a cell with ``n > 0`` and no value is
an undefined metric such as a single-class AUC.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Any, Iterable

from werewolf_sim.metrics.loader import GameData
from werewolf_sim.metrics.scores import ConfusionCounts
from werewolf_sim.metrics.tables import (
    ALL,
    ROLES,
    TrendReport,
    calibration,
    cross_perception,
    observer_accuracy,
    per_role_stats,
    round_trends,
    type_effects,
)

SECTIONS = (
    "per_role",
    "cross_perception_smoothed",
    "cross_perception_raw",
    "observer_accuracy",
    "calibration",
    "trends",
    "type_effects",
)

SECTION_TITLES = {
    "per_role": "Per-role deception statistics",
    "cross_perception_smoothed": "Cross-perception matrix (final smoothed suspicion, observer -> target)",
    "cross_perception_raw": "Cross-perception matrix (mean raw suspicion, observer -> target)",
    "observer_accuracy": "Observer accuracy by observer role",
    "calibration": "Calibration and threshold metrics by observer role",
    "trends": "Suspicion by round and target role",
    "type_effects": "Deception-type prevalence and peer response",
}

REFERENCE_COUNTS = ConfusionCounts(tp=702, tn=270, fp=213, fn=526)
REFERENCE_PRINTED = {"accuracy": 0.52, "precision": 0.72}

FIGURE_COLUMNS = ("round", "role", "mean_suspicion", "sem", "flagged_fraction", "ci_low", "ci_high", "n_games")


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class ReportCell:
    section: str
    row: str
    column: str
    value: float | int | None
    sem: float | None = None
    n: int = 0

    @property
    def absent(self) -> bool:
        """Undefined despite having observations."""
        return self.value is None and self.n > 0


def accuracy_footnote() -> str:
    c = REFERENCE_COUNTS
    return (
        f"Accuracy, precision, recall and F1 use the standard definitions. As a check, the reference "
        f"counts tp={c.tp}, tn={c.tn}, fp={c.fp}, fn={c.fn} give precision {c.precision:.3f} and accuracy "
        f"{c.accuracy:.3f}. The values {REFERENCE_PRINTED['precision']:.2f} and "
        f"{REFERENCE_PRINTED['accuracy']:.2f} sometimes quoted for these counts do not follow from these formulas."
    )


def _cells(games: list[GameData]) -> tuple[list[ReportCell], TrendReport]:
    cells: list[ReportCell] = []
    add = cells.append
    for st in per_role_stats(games):
        n = st.mean_suspicion.n
        add(ReportCell("per_role", st.role, "statements", st.statements, None, st.statements))
        add(ReportCell("per_role", st.role, "self_deceptions", st.self_deceptions, None, st.statements))
        add(ReportCell("per_role", st.role, "mean_suspicion", st.mean_suspicion.value, st.mean_suspicion.sem, n))
        add(ReportCell("per_role", st.role, "flagged_fraction", st.flagged_fraction.value, st.flagged_fraction.sem, n))
    for mode in ("smoothed", "raw"):
        for o_role, row in cross_perception(games, mode).items():
            for t_role, cell in row.items():
                add(ReportCell(f"cross_perception_{mode}", o_role, t_role, cell.value, cell.sem, cell.n))
    for group, counts in observer_accuracy(games).items():
        for col, val in counts.to_dict().items():
            add(ReportCell("observer_accuracy", group, col, val, None, counts.total))
    for row in calibration(games):
        for col in ("brier", "roc_auc", "auprc"):
            add(ReportCell("calibration", row.group, col, getattr(row, col), None, row.n))
    trends = round_trends(games)
    for p in trends.points:
        add(ReportCell("trends", p.role, f"round {p.round} suspicion", p.mean_suspicion, p.sem, p.n_games))
        add(ReportCell("trends", p.role, f"round {p.round} flagged", p.flagged_fraction, p.flagged_sem, p.n_games))
    for role, slope in trends.slopes_pp_per_round.items():
        n = sum(1 for p in trends.points if p.role == role)
        add(ReportCell("trends", role, "theil_sen_pp_per_round", slope, None, n))
    for te in type_effects(games):
        n = te.mean_suspicion.n
        add(ReportCell("type_effects", te.dtype, "count", te.count, None, te.count))
        add(ReportCell("type_effects", te.dtype, "mean_suspicion", te.mean_suspicion.value, te.mean_suspicion.sem, n))
        add(ReportCell("type_effects", te.dtype, "flagged_fraction", te.flagged_fraction.value, te.flagged_fraction.sem, n))
    return cells, trends


def build_report(manifest: dict | None, games: Iterable[GameData]) -> dict[str, Any]:
    games = sorted(games, key=lambda g: g.game_id)
    modes = {g.mode for g in games}
    if manifest and manifest.get("mode"):
        modes.add(manifest["mode"])
    if len(modes) > 1:
        raise ReportError(f"refusing to mix modes in one report: {sorted(m or '?' for m in modes)}")
    cells, trends = _cells(games)
    notes = [accuracy_footnote()]
    if trends.omitted_rounds:
        skipped = "; ".join(f"{role}: {rounds}" for role, rounds in trends.omitted_rounds.items())
        notes.append(f"Trend rounds reached by fewer than two games are omitted ({skipped}).")
    notes.append("Cells marked -- have no observations (e.g. a single Seer cannot rate another Seer).")
    meta = {
        "run_id": (manifest or {}).get("run_id"),
        "mode": next(iter(modes), None),
        "games": len(games),
        "seeds": [g.seed for g in games],
        "config_hash": (manifest or {}).get("config_hash"),
        "winners": {w: sum(1 for g in games if g.winner == w) for w in sorted({g.winner or "?" for g in games})},
    }
    return {"metadata": meta, "cells": cells, "trends": trends, "notes": notes}


def _fmt(v: float | int | None) -> str:
    if v is None:
        return ""
    return str(v) if isinstance(v, int) else repr(float(v))


def render_json(report: dict[str, Any]) -> str:
    tables: dict[str, list[dict]] = {s: [] for s in SECTIONS}
    for c in report["cells"]:
        tables[c.section].append({"row": c.row, "column": c.column, "value": c.value, "sem": c.sem, "n": c.n})
    doc = {"metadata": report["metadata"], "tables": tables, "notes": report["notes"]}
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def render_csv(report: dict[str, Any]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "row", "column", "value", "sem", "n"])
    for c in report["cells"]:
        w.writerow([c.section, c.row, c.column, _fmt(c.value), _fmt(c.sem), c.n])
    return buf.getvalue()


def _md_value(c: ReportCell | None) -> str:
    if c is None or c.n == 0:
        return "--"
    if c.value is None:
        return "NA"
    if isinstance(c.value, int):
        return str(c.value)
    text = f"{c.value:.3f}"
    return f"{text} ± {c.sem:.3f}" if c.sem is not None else text


def render_markdown(report: dict[str, Any]) -> str:
    meta = report["metadata"]
    out = [
        "# Deception report",
        "",
        f"- run: {meta['run_id']}",
        f"- mode: {meta['mode']}",
        f"- games: {meta['games']}",
        f"- seeds: {', '.join(str(s) for s in meta['seeds'])}",
        f"- config hash: {meta['config_hash']}",
        f"- outcomes: {', '.join(f'{k} {v}' for k, v in meta['winners'].items())}",
        "",
        "Values are pooled means ± SEM across games where an SEM is defined.",
    ]
    by_section: dict[str, list[ReportCell]] = {s: [] for s in SECTIONS}
    for c in report["cells"]:
        by_section[c.section].append(c)
    for i, section in enumerate(SECTIONS):
        cells = by_section[section]
        rows = list(dict.fromkeys(c.row for c in cells))
        cols = list(dict.fromkeys(c.column for c in cells))
        lookup = {(c.row, c.column): c for c in cells}
        out += ["", f"## {SECTION_TITLES[section]}", ""]
        out.append("| | " + " | ".join(cols) + " |")
        out.append("|---" * (len(cols) + 1) + "|")
        for r in rows:
            out.append(f"| {r} | " + " | ".join(_md_value(lookup.get((r, c))) for c in cols) + " |")
        if section == "observer_accuracy":
            out += ["", f"[1] {report['notes'][0]}"]
    out += ["", "## Notes", ""] + [f"- {n}" for n in report["notes"]]
    return "\n".join(out) + "\n"


def render(report: dict[str, Any], fmt: str) -> str:
    renderers = {"markdown": render_markdown, "md": render_markdown, "csv": render_csv, "json": render_json}
    if fmt not in renderers:
        raise ReportError(f"unknown format {fmt!r}")
    return renderers[fmt](report)


def run_report(manifest: dict | None, games: Iterable[GameData], fmt: str = "markdown") -> str:
    return render(build_report(manifest, games), fmt)


def figure_csv(trends: TrendReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIGURE_COLUMNS)
    for p in trends.points:
        w.writerow(
            [p.round, p.role, _fmt(p.mean_suspicion), _fmt(p.sem), _fmt(p.flagged_fraction), _fmt(p.ci_low), _fmt(p.ci_high), p.n_games]
        )
    return buf.getvalue()


def absent_cells(report: dict[str, Any]) -> list[ReportCell]:
    return [c for c in report["cells"] if c.absent]


__all__ = [
    "ALL",
    "FIGURE_COLUMNS",
    "ROLES",
    "SECTIONS",
    "ReportCell",
    "ReportError",
    "absent_cells",
    "accuracy_footnote",
    "build_report",
    "figure_csv",
    "render",
    "run_report",
]
