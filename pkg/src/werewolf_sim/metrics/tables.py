"""Run-level tables: per-role stats, cross-perception, accuracy, calibration, trends, type effects.

Every function takes parsed games and reduces them in game-id order, so the
output is independent of load order. Cells with no underlying observations
carry ``n == 0`` and ``value is None``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Callable, Iterable, Sequence

from werewolf_sim.deception import DeceptionType
from werewolf_sim.game import Role
from werewolf_sim.metrics.loader import GameData, JudgmentRow
from werewolf_sim.metrics.scores import Z95, ConfusionCounts, auprc, brier, mean, roc_auc, sem, theil_sen

ROLES = [r.value for r in Role]
TYPES = [t.value for t in DeceptionType]
ALL = "All"


@dataclass(frozen=True)
class Cell:
    value: float | None
    sem: float | None
    n: int


def _ordered(games: Iterable[GameData]) -> list[GameData]:
    return sorted(games, key=lambda g: g.game_id)


def _pooled_cell(
    games: Sequence[GameData],
    select: Callable[[GameData], list[float]],
) -> Cell:
    """Pooled mean over all observations; SEM across per-game means."""
    pooled: list[float] = []
    per_game: list[float] = []
    for g in games:
        vals = select(g)
        if vals:
            pooled.extend(vals)
            per_game.append(mean(vals))
    return Cell(mean(pooled), sem(per_game), len(pooled))


@dataclass(frozen=True)
class PerRoleStats:
    role: str
    statements: int
    self_deceptions: int
    mean_suspicion: Cell
    flagged_fraction: Cell


def per_role_stats(games: Iterable[GameData]) -> list[PerRoleStats]:
    games = _ordered(games)
    if not games:
        return []
    out = []
    for role in ROLES:
        stmts = [s for g in games for s in g.statements if s.speaker_role == role]

        def rows(g: GameData, role=role) -> list[JudgmentRow]:
            return [j for j in g.judgments if j.speaker_role == role]

        out.append(
            PerRoleStats(
                role,
                len(stmts),
                sum(1 for s in stmts if s.deceptive == 1),
                _pooled_cell(games, lambda g: [j.suspicion for j in rows(g)]),
                _pooled_cell(games, lambda g: [float(j.flagged) for j in rows(g)]),
            )
        )
    return out


def cross_perception(games: Iterable[GameData], mode: str = "smoothed") -> dict[str, dict[str, Cell]]:
    """Observer role -> target role suspicion.

    ``smoothed`` averages the final smoothed value of every ordered pair of
    distinct players; ``raw`` averages the raw per-statement suspicion scores.
    """
    if mode not in ("smoothed", "raw"):
        raise ValueError(f"unknown mode {mode!r}")
    games = _ordered(games)
    out: dict[str, dict[str, Cell]] = {}
    for o_role in ROLES:
        out[o_role] = {}
        for t_role in ROLES:
            if mode == "smoothed":

                def select(g: GameData, o_role=o_role, t_role=t_role) -> list[float]:
                    return [
                        v
                        for (o, t), v in sorted(g.final_suspicion.items())
                        if g.roles.get(o) == o_role and g.roles.get(t) == t_role
                    ]

            else:

                def select(g: GameData, o_role=o_role, t_role=t_role) -> list[float]:
                    return [
                        j.suspicion for j in g.judgments if j.observer_role == o_role and j.speaker_role == t_role
                    ]

            out[o_role][t_role] = _pooled_cell(games, select)
    return out


def observer_accuracy(games: Iterable[GameData]) -> dict[str, ConfusionCounts]:
    """Peer flags against the speaker's self label, grouped by observer role, plus ``All``."""
    games = _ordered(games)
    out = {}
    for role in ROLES:
        out[role] = ConfusionCounts.from_pairs(
            (j.flagged, j.truth) for g in games for j in g.judgments if j.observer_role == role
        )
    out[ALL] = ConfusionCounts.from_pairs((j.flagged, j.truth) for g in games for j in g.judgments)
    return out


@dataclass(frozen=True)
class CalibrationRow:
    group: str
    brier: float | None
    roc_auc: float | None
    auprc: float | None
    n: int


def calibration(games: Iterable[GameData]) -> list[CalibrationRow]:
    """Suspicion as a probability of the speaker's self label, grouped by observer role."""
    games = _ordered(games)
    out = []
    for role in ROLES + [ALL]:
        pairs = [
            (j.suspicion, j.truth)
            for g in games
            for j in g.judgments
            if role == ALL or j.observer_role == role
        ]
        out.append(CalibrationRow(role, brier(pairs), roc_auc(pairs), auprc(pairs), len(pairs)))
    return out


@dataclass(frozen=True)
class TrendPoint:
    round: int
    role: str  # target role, or "All" for every target
    mean_suspicion: float
    sem: float | None
    ci_low: float | None
    ci_high: float | None
    flagged_fraction: float
    flagged_sem: float | None
    n_games: int


@dataclass(frozen=True)
class TrendReport:
    points: list[TrendPoint]
    slopes_pp_per_round: dict[str, float | None]
    omitted_rounds: dict[str, list[int]]


def round_trends(games: Iterable[GameData], *, min_games: int = 2) -> TrendReport:
    """Per round and target role: mean over games of each game's mean raw suspicion.

    Rounds without statements are omitted; so are rounds reached by fewer than
    ``min_games`` games, which carry no across-game variability.
    """
    games = _ordered(games)
    per_game: dict[tuple[int, str], list[tuple[float, float]]] = defaultdict(list)
    for g in games:
        acc: dict[tuple[int, str], list[JudgmentRow]] = defaultdict(list)
        for j in g.judgments:
            acc[j.round, j.speaker_role].append(j)
            acc[j.round, ALL].append(j)
        for key, rows in sorted(acc.items()):
            per_game[key].append((mean([r.suspicion for r in rows]), mean([float(r.flagged) for r in rows])))

    points = []
    omitted: dict[str, list[int]] = defaultdict(list)
    for (rnd, role), vals in sorted(per_game.items(), key=lambda kv: (kv[0][0], (ROLES + [ALL]).index(kv[0][1]))):
        if len(vals) < min_games:
            omitted[role].append(rnd)
            continue
        susp = [v[0] for v in vals]
        flags = [v[1] for v in vals]
        m, e = mean(susp), sem(susp)
        points.append(
            TrendPoint(
                rnd,
                role,
                m,
                e,
                None if e is None else m - Z95 * e,
                None if e is None else m + Z95 * e,
                mean(flags),
                sem(flags),
                len(vals),
            )
        )
    slopes = {}
    for role in ROLES + [ALL]:
        series = [(p.round, 100.0 * p.mean_suspicion) for p in points if p.role == role]
        slopes[role] = theil_sen(series)
    return TrendReport(points, slopes, {k: v for k, v in omitted.items()})


@dataclass(frozen=True)
class TypeEffect:
    dtype: str
    count: int
    mean_suspicion: Cell
    flagged_fraction: Cell


def type_effects(games: Iterable[GameData]) -> list[TypeEffect]:
    """Peer response grouped by the speaker's self-labelled deception type."""
    games = _ordered(games)
    out = []
    for dtype in TYPES:
        count = sum(1 for g in games for s in g.statements if s.dtype == dtype)

        def rows(g: GameData, dtype=dtype) -> list[JudgmentRow]:
            ids = {s.id for s in g.statements if s.dtype == dtype}
            return [j for j in g.judgments if j.statement in ids]

        out.append(
            TypeEffect(
                dtype,
                count,
                _pooled_cell(games, lambda g: [j.suspicion for j in rows(g)]),
                _pooled_cell(games, lambda g: [float(j.flagged) for j in rows(g)]),
            )
        )
    return out


def as_dict(obj) -> dict:
    return asdict(obj)
