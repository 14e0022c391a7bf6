"""Temperature-softmax solver agents"""
import logging
import math

import numpy as np

from app.errors import InsufficientDataError
from app.features.games.domain import GameState
from app.features.games.engine import legal_moves
from app.features.solver.domain import QVector, SolverAgentConfig
from app.features.solver.negamax import ConnectFourSolver, get_solver

logger = logging.getLogger(__name__)


def solver_policy(q: QVector, cfg: SolverAgentConfig) -> np.ndarray:
    """
    Move probabilities aligned with ``q.moves``.

    ``temperature == 0`` splits mass uniformly over the best moves,
    ``inf`` plays uniformly over all legal moves.

    Raises:
        InsufficientDataError: empty q-vector
    """
    if len(q) == 0:
        raise InsufficientDataError("Solver policy needs at least one legal move")

    values = np.asarray(q.values, dtype=np.float64)
    temperature = cfg.temperature

    if math.isinf(temperature):
        return np.full(len(values), 1.0 / len(values))

    if temperature == 0:
        best = values == values.max()
        return best / best.sum()

    logits = (values - values.max()) / temperature
    weights = np.exp(logits)
    return weights / weights.sum()


def solver_agent_move(
    state: GameState,
    cfg: SolverAgentConfig,
    rng: np.random.Generator,
    solver: ConnectFourSolver | None = None,
) -> int:
    """Sample a move from the solver policy of ``state``"""
    if math.isinf(cfg.temperature):
        # uniform play needs no solve
        moves = legal_moves(state)
        return moves[int(rng.integers(len(moves)))]
    solver = solver or get_solver()
    q = solver.solve(state)
    probs = solver_policy(q, cfg)
    index = int(rng.choice(len(probs), p=probs))
    return q.moves[index]
