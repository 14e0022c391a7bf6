"""Playable agents: uniform random, temperature-softmax solver, network-guided search"""
import logging
from functools import lru_cache
from typing import Optional, Protocol

import numpy as np

from app.errors import UnsupportedGameError
from app.features.arena.domain import AgentKind
from app.features.arena.schemas import AgentSpec, MatchConfig
from app.features.games.domain import GameId, GameState
from app.features.games.engine import legal_moves
from app.features.network.accounting import forward_flops
from app.features.network.domain import NetworkParams
from app.features.network.repositories.checkpoints import CheckpointHeader, load_checkpoint
from app.features.search.domain import SearchConfig
from app.features.search.evaluators import NetworkEvaluator
from app.features.search.mcts import search, select_move
from app.features.solver.domain import SolverAgentConfig
from app.features.solver.policy import solver_agent_move

logger = logging.getLogger(__name__)


class Agent(Protocol):
    id: str
    simulations: Optional[int]

    def select(self, state: GameState, rng: np.random.Generator) -> int:
        ...


class RandomAgent:
    """Uniform over legal moves; the Elo anchor"""

    def __init__(self, agent_id: str = AgentKind.RANDOM.value):
        self.id = agent_id
        self.simulations = None

    def select(self, state: GameState, rng: np.random.Generator) -> int:
        moves = legal_moves(state)
        return moves[int(rng.integers(len(moves)))]


class SolverAgent:
    def __init__(self, agent_id: str, temperature: float):
        self.id = agent_id
        self.simulations = None
        self.cfg = SolverAgentConfig(temperature=temperature)

    def select(self, state: GameState, rng: np.random.Generator) -> int:
        return solver_agent_move(state, self.cfg, rng)


class NetworkAgent:
    """Network-guided search at match temperature, without root noise"""

    def __init__(
        self,
        agent_id: str,
        params: NetworkParams,
        header: CheckpointHeader,
        simulations: int,
        temperature: float,
    ):
        self.id = agent_id
        self.params = params
        self.header = header
        self.simulations = simulations
        self.forward_flops = forward_flops(params.arch)
        self.search_cfg = SearchConfig.for_matches(max_simulations=simulations).model_copy(
            update={"temperature": temperature}
        )
        self._evaluator = NetworkEvaluator(params)

    def select(self, state: GameState, rng: np.random.Generator) -> int:
        result = search(state, self._evaluator, self.search_cfg, rng, add_noise=False)
        return select_move(
            result.policy,
            self.search_cfg.temperature,
            state.ply,
            self.search_cfg.temperature_drop,
            rng,
            result.moves,
        )


@lru_cache(maxsize=64)
def _load_params(path: str) -> tuple[NetworkParams, CheckpointHeader]:
    return load_checkpoint(path)


def agent_forward_flops(spec: AgentSpec) -> Optional[int]:
    """F of a network agent's checkpoint; None for agents without a network"""
    if spec.kind is not AgentKind.NETWORK:
        return None
    params, _ = _load_params(spec.checkpoint)
    return forward_flops(params.arch)


def load_agent(spec: AgentSpec, cfg: MatchConfig, simulations: Optional[int] = None):
    """
    Build a playable agent.

    Raises:
        MissingInputError: checkpoint missing or unreadable
        UnsupportedGameError: solver agents outside Connect Four, or a checkpoint for another game
    """
    if spec.kind is AgentKind.RANDOM:
        return RandomAgent(spec.id)

    if spec.kind is AgentKind.SOLVER:
        if cfg.game is not GameId.CONNECT_FOUR:
            raise UnsupportedGameError(f"Solver agent '{spec.id}' only plays Connect Four")
        return SolverAgent(spec.id, spec.temperature)

    params, header = _load_params(spec.checkpoint)
    if header.game is not cfg.game:
        logger.error(f"Agent {spec.id} was trained on {header.game.value}, not {cfg.game.value}")
        raise UnsupportedGameError(f"Agent '{spec.id}' plays {header.game.value}, not {cfg.game.value}")
    sims = simulations or spec.simulations or cfg.simulations
    return NetworkAgent(spec.id, params, header, sims, cfg.temperature)
