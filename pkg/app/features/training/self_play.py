"""Self-play game generation"""
import logging
from dataclasses import dataclass

import numpy as np

from app.features.games.domain import ACTION_COUNT, GameId, Outcome
from app.features.games.engine import (
    apply_move,
    initial_state,
    legal_mask,
    observation,
    terminal_status,
)
from app.features.network.domain import NetworkParams, TrainingExample
from app.features.search.domain import SearchConfig
from app.features.search.evaluators import Evaluator, NetworkEvaluator
from app.features.search.mcts import search, select_move, subtree

logger = logging.getLogger(__name__)


@dataclass
class SelfPlayGame:
    examples: list[TrainingExample]
    moves: list[int]
    outcome: Outcome
    first_player_score: float
    evaluations: int

    @property
    def length(self) -> int:
        return len(self.moves)


def self_play_game(
    game: GameId,
    evaluator: Evaluator | NetworkParams,
    cfg: SearchConfig,
    rng: np.random.Generator,
) -> SelfPlayGame:
    """
    Play one game against itself with root noise and the temperature schedule.

    Every position yields (observation, visit distribution, z) where z is the
    final result for the player to move at that position.
    """
    if isinstance(evaluator, NetworkParams):
        evaluator = NetworkEvaluator(evaluator)

    state = initial_state(game)
    pending: list[tuple[np.ndarray, np.ndarray, np.ndarray, int]] = []
    moves: list[int] = []
    evaluations = 0
    reuse = None

    while not terminal_status(state).is_terminal:
        result = search(state, evaluator, cfg, rng, add_noise=True, reuse=reuse)
        evaluations += result.evaluations + result.terminal_evaluations
        pending.append(
            (observation(state), legal_mask(state), result.full_policy(ACTION_COUNT[game]), state.to_move)
        )
        move = select_move(result.policy, cfg.temperature, state.ply, cfg.temperature_drop, rng, result.moves)
        reuse = subtree(result, move) if cfg.reuse_tree else None
        state = apply_move(state, move)
        moves.append(move)

    status = terminal_status(state)
    examples = []
    for obs, mask, policy, mover in pending:
        if status.outcome is Outcome.DRAW:
            z = 0.0
        else:
            z = 1.0 if status.winner == mover else -1.0
        examples.append(TrainingExample(observation=obs, legal_mask=mask, policy=policy, z=z))

    return SelfPlayGame(
        examples=examples,
        moves=moves,
        outcome=status.outcome,
        first_player_score=status.score_for(0),
        evaluations=evaluations,
    )


def play_game_task(args: tuple[GameId, NetworkParams, SearchConfig, int, int]) -> SelfPlayGame:
    """Process-pool entry point: one game with the RNG derived from (seed, game_index)"""
    game, params, cfg, seed, game_index = args
    rng = np.random.default_rng([seed, game_index])
    return self_play_game(game, params, cfg, rng)
