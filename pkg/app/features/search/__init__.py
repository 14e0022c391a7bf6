"""Monte Carlo tree search feature module"""

from app.features.search.domain import (
    DEFAULT_TEMPERATURE_DROP,
    MATCH_TEMPERATURE,
    ProvenStatus,
    SearchConfig,
    SearchResult,
)
from app.features.search.evaluators import Evaluator, NetworkEvaluator, UniformEvaluator
from app.features.search.mcts import Node, apply_dirichlet_noise, search, select_move, subtree

__all__ = [
    "DEFAULT_TEMPERATURE_DROP",
    "MATCH_TEMPERATURE",
    "ProvenStatus",
    "SearchConfig",
    "SearchResult",
    "Evaluator",
    "NetworkEvaluator",
    "UniformEvaluator",
    "Node",
    "apply_dirichlet_noise",
    "search",
    "select_move",
    "subtree",
]
