from werewolf_sim.metrics.loader import GameData, game_from_records, load_game, load_run
from werewolf_sim.metrics.report import build_report, figure_csv, render, run_report
from werewolf_sim.metrics.scores import ConfusionCounts, auprc, brier, ci95, roc_auc, sem, theil_sen
from werewolf_sim.metrics.tables import (
    calibration,
    cross_perception,
    observer_accuracy,
    per_role_stats,
    round_trends,
    type_effects,
)

__all__ = [
    "ConfusionCounts",
    "GameData",
    "auprc",
    "brier",
    "build_report",
    "calibration",
    "ci95",
    "cross_perception",
    "figure_csv",
    "game_from_records",
    "load_game",
    "load_run",
    "observer_accuracy",
    "per_role_stats",
    "render",
    "roc_auc",
    "round_trends",
    "run_report",
    "sem",
    "theil_sen",
    "type_effects",
]
