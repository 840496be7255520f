"""Werewolf social-deduction simulator with deception analysis and an event-sourced log."""

from werewolf_sim.game import Faction, GameConfig, GameState, Phase, Role

__version__ = "0.1.0"

__all__ = ["Faction", "GameConfig", "GameState", "Phase", "Role", "__version__"]
