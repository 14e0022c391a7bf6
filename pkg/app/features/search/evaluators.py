"""Leaf evaluators: map a position to (priors over its legal moves, value for the side to move)"""
from typing import Protocol

import numpy as np

from app.features.games.domain import GameState
from app.features.games.engine import legal_mask, observation
from app.features.network.domain import NetworkParams
from app.features.network.mlp import forward


class Evaluator(Protocol):
    def __call__(self, state: GameState, moves: list[int]) -> tuple[np.ndarray, float]:
        ...


class NetworkEvaluator:
    """Evaluates leaves with the policy/value network"""

    def __init__(self, params: NetworkParams):
        self.params = params

    def __call__(self, state: GameState, moves: list[int]) -> tuple[np.ndarray, float]:
        output = forward(self.params, observation(state), legal_mask(state))
        priors = np.asarray(output.prior, dtype=np.float64)[moves]
        return priors / priors.sum(), float(output.value)


class UniformEvaluator:
    """Uniform priors and a neutral value; search driven by exact terminals only"""

    def __call__(self, state: GameState, moves: list[int]) -> tuple[np.ndarray, float]:
        return np.full(len(moves), 1.0 / len(moves)), 0.0
