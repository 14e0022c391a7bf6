"""Game-agnostic entry points dispatching to the Connect Four and Pentago rules"""

import numpy as np

from app.features.games import connect_four, pentago
from app.features.games.domain import (
    ACTION_COUNT,
    BOARD_SHAPE,
    GameId,
    GameState,
    TerminalStatus,
)

_RULES = {
    GameId.CONNECT_FOUR: connect_four,
    GameId.PENTAGO: pentago,
}


def _observation_shifts(game: GameId) -> np.ndarray:
    rows, cols = BOARD_SHAPE[game]
    cell_bit = _RULES[game].cell_bit
    return np.array([cell_bit(r, c) for r in range(rows) for c in range(cols)], dtype=np.uint64)


_SHIFTS = {game: _observation_shifts(game) for game in GameId}


def initial_state(game: GameId) -> GameState:
    return _RULES[game].initial_state()


def legal_moves(state: GameState) -> list[int]:
    """
    Legal action ids in ascending order; empty on terminal states.

    Connect Four actions are columns. Pentago actions are
    ``cell * 8 + quadrant * 2 + direction`` (CW before CCW).
    """
    return _RULES[state.game].legal_moves(state)


def apply_move(state: GameState, move: int) -> GameState:
    """Play ``move``; raises IllegalMoveError naming the violated rule"""
    return _RULES[state.game].apply_move(state, move)


def terminal_status(state: GameState) -> TerminalStatus:
    return _RULES[state.game].terminal_status(state)


def legal_mask(state: GameState) -> np.ndarray:
    mask = np.zeros(ACTION_COUNT[state.game], dtype=bool)
    mask[legal_moves(state)] = True
    return mask


def observation(state: GameState) -> np.ndarray:
    """
    Flattened one-hot planes: side-to-move tokens, opponent tokens, empty.

    Plane-major, then row-major with the top row first.
    """
    shifts = _SHIFTS[state.game]
    mine = (np.uint64(state.boards[state.to_move]) >> shifts) & np.uint64(1)
    theirs = (np.uint64(state.boards[1 - state.to_move]) >> shifts) & np.uint64(1)
    empty = np.uint64(1) - mine - theirs
    return np.concatenate([mine, theirs, empty]).astype(np.float32)


def position_key(state: GameState) -> int:
    """Exact, collision-free key of the position (both bitplanes and side to move)"""
    return (state.boards[0] << 64) | (state.boards[1] << 1) | state.to_move


def replay(game: GameId, moves: list[int]) -> GameState:
    state = initial_state(game)
    for move in moves:
        state = apply_move(state, move)
    return state


def random_playout(state: GameState, rng: np.random.Generator) -> tuple[GameState, list[int]]:
    """Play uniformly random legal moves to the end of the game"""
    moves: list[int] = []
    while True:
        options = legal_moves(state)
        if not options:
            return state, moves
        move = options[int(rng.integers(len(options)))]
        state = apply_move(state, move)
        moves.append(move)
