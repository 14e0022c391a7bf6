"""Single games between two agents"""
import logging
import zlib
from typing import Optional

import numpy as np

from app.features.arena.agents import Agent, NetworkAgent
from app.features.arena.schemas import MatchConfig, MatchRecord
from app.features.games.codec import encode_moves
from app.features.games.domain import GameState
from app.features.games.engine import apply_move, initial_state, legal_moves, terminal_status

logger = logging.getLogger(__name__)


def game_seed(cfg: MatchConfig, a: str, b: str, game_index: int, budget: Optional[int] = None) -> int:
    """Per-game seed derived from the tournament seed, the pairing and the game index"""
    entropy = [cfg.seed, zlib.crc32(a.encode()), zlib.crc32(b.encode()), game_index]
    if budget is not None:
        entropy.append(budget)
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0])


def random_opening(cfg: MatchConfig, a: str, b: str, game_index: int) -> list[int]:
    """
    ``cfg.opening_plies`` uniformly random moves leading to a non-terminal position.

    Both color assignments of a pairing (game indices 2k and 2k+1) share the opening.
    """
    if cfg.opening_plies == 0:
        return []
    first, second = sorted((a, b))
    rng = np.random.default_rng(game_seed(cfg, first, second, game_index // 2))
    while True:
        state = initial_state(cfg.game)
        moves: list[int] = []
        while len(moves) < cfg.opening_plies and not terminal_status(state).is_terminal:
            options = legal_moves(state)
            move = options[int(rng.integers(len(options)))]
            state = apply_move(state, move)
            moves.append(move)
        if not terminal_status(state).is_terminal:
            return moves


def play_match(
    agent_a: Agent,
    agent_b: Agent,
    cfg: MatchConfig,
    game_index: int = 0,
    opening: Optional[list[int]] = None,
    budget: Optional[int] = None,
    flagged: bool = False,
) -> MatchRecord:
    """
    Play one game. Agent ``a`` moves first on even game indices and second on
    odd ones, so repeated pairings are color balanced.
    """
    seed = game_seed(cfg, agent_a.id, agent_b.id, game_index, budget)
    rng = np.random.default_rng(seed)
    a_first = game_index % 2 == 0
    players = (agent_a, agent_b) if a_first else (agent_b, agent_a)

    state: GameState = initial_state(cfg.game)
    moves: list[int] = []
    for move in opening or []:
        state = apply_move(state, move)
        moves.append(move)

    while not terminal_status(state).is_terminal:
        agent = players[state.to_move]
        move = agent.select(state, rng)
        state = apply_move(state, move)
        moves.append(move)

    status = terminal_status(state)
    a_player = 0 if a_first else 1
    return MatchRecord(
        a=agent_a.id,
        b=agent_b.id,
        score_a=status.score_for(a_player),
        seed=seed,
        transcript=encode_moves(cfg.game, moves),
        sims_a=agent_a.simulations,
        sims_b=agent_b.simulations,
        game_index=game_index,
        first="a" if a_first else "b",
        flagged=flagged,
        budget=budget,
    )


def simulations_for_budget(budget: int, flops: int) -> int:
    """Simulations per move affordable with ``budget`` FLOPs per move, at least one"""
    return max(budget // flops, 1)


def inference_constrained_match(
    agent_a: NetworkAgent,
    agent_b: NetworkAgent,
    budget: int,
    cfg: MatchConfig,
    game_index: int = 0,
) -> MatchRecord:
    """
    Play with per-agent simulations scaled inversely to forward-pass cost.

    Agents left with fewer than two simulations are flagged.
    """
    for agent in (agent_a, agent_b):
        sims = simulations_for_budget(budget, agent.forward_flops)
        agent.simulations = sims
        agent.search_cfg = agent.search_cfg.model_copy(update={"max_simulations": sims})
    flagged = min(agent_a.simulations, agent_b.simulations) < 2
    if flagged:
        logger.warning(
            f"Budget {budget} leaves {agent_a.id}={agent_a.simulations} / {agent_b.id}={agent_b.simulations} sims"
        )
    return play_match(agent_a, agent_b, cfg, game_index, budget=budget, flagged=flagged)
