"""Solvers for two-player generalised reachability games."""

from grg.arena import ADAM, EVE, Arena, GameSpec, Player, load_game, parse_game, serialize_game
from grg.genreach import SolveOutcome, solve
from grg.maxreach import ValueResult, max_value, promise_value

__all__ = [
    "ADAM", "EVE", "Arena", "GameSpec", "Player", "SolveOutcome", "ValueResult",
    "load_game", "max_value", "parse_game", "promise_value", "serialize_game", "solve",
]
