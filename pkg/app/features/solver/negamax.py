"""
Exact Connect Four solver.

Scores use the ply lattice of the q-vector: with ``m`` stones on the board the
side to move scores ``41 - m`` for a win with its next stone, ``-(40 - m)``
when the opponent wins right after, and 0 for a draw. A win completed with the 42nd stone
scores 1 rather than 0 so it cannot be mistaken for a draw. Search is negamax with
alpha-beta, a null-window binary search over the score range, center-first
move ordering refined by created threats, and a direct-mapped transposition
table. The table only accelerates: results are identical without it.
"""
import logging
from typing import Optional

import numpy as np

from app.config import SOLVER_CACHE_PATH, SOLVER_TT_LOG2
from app.errors import UnsupportedGameError
from app.features.games import connect_four as c4
from app.features.games.codec import canonical_codec
from app.features.games.domain import GameId, GameState
from app.features.games.engine import terminal_status
from app.features.solver.domain import QVector
from app.features.solver.repositories.solver_cache import SolverCacheRepository

logger = logging.getLogger(__name__)

CENTER_FIRST = (3, 2, 4, 1, 5, 0, 6)

_LOWER = 1
_UPPER = 2


class TranspositionTable:
    """Fixed-size direct-mapped table of score bounds, always-replace"""

    def __init__(self, log2_size: int = SOLVER_TT_LOG2):
        self.size = 1 << log2_size
        self._keys = np.zeros(self.size, dtype=np.uint64)
        self._values = np.zeros(self.size, dtype=np.int8)
        self._flags = np.zeros(self.size, dtype=np.uint8)

    def put(self, key: int, value: int, flag: int) -> None:
        slot = key % self.size
        self._keys[slot] = key
        self._values[slot] = value
        self._flags[slot] = flag

    def get(self, key: int) -> tuple[int, int]:
        """(flag, value); flag 0 means no entry"""
        slot = key % self.size
        if self._flags[slot] and int(self._keys[slot]) == key:
            return int(self._flags[slot]), int(self._values[slot])
        return 0, 0

    def clear(self) -> None:
        self._flags.fill(0)


def _non_losing_moves(current: int, mask: int) -> int:
    """Playable cells that do not hand the opponent an immediate win"""
    possible = c4.playable_cells(mask)
    opponent_wins = c4.winning_cells(current ^ mask, mask)
    forced = possible & opponent_wins
    if forced:
        if forced & (forced - 1):
            return 0
        possible = forced
    return possible & ~(opponent_wins >> 1)


def _can_win_next(current: int, mask: int) -> bool:
    return bool(c4.winning_cells(current, mask) & c4.playable_cells(mask))


def win_score(ply: int) -> int:
    """Score of a win completed with the stone placed at overall ``ply``"""
    # a win with the 42nd stone keeps magnitude 1 so it never ties a draw
    return max(c4.CELLS - ply, 1)


def _popcount(bits: int) -> int:
    return bits.bit_count()


class ConnectFourSolver:
    """Negamax solver producing q-vectors for Connect Four positions"""

    def __init__(
        self,
        tt_log2: Optional[int] = SOLVER_TT_LOG2,
        cache: Optional[SolverCacheRepository] = None,
    ):
        self.table = TranspositionTable(tt_log2) if tt_log2 is not None else None
        self.cache = cache
        self.node_count = 0

    # ============================================================================
    # SEARCH
    # ============================================================================

    def _negamax(self, current: int, mask: int, moves: int, alpha: int, beta: int) -> int:
        # Precondition: the side to move cannot win with its next stone
        self.node_count += 1

        if moves >= c4.CELLS:
            return 0

        candidates = _non_losing_moves(current, mask)
        if not candidates:
            return -win_score(moves + 2)

        if moves >= c4.CELLS - 2:
            return 0

        # no loss before ply moves+4, no win before ply moves+3
        lower = -win_score(moves + 4) if moves + 4 <= c4.CELLS else 0
        if alpha < lower:
            alpha = lower
            if alpha >= beta:
                return alpha

        upper = win_score(moves + 3)
        if beta > upper:
            beta = upper
            if alpha >= beta:
                return beta

        key = current + mask
        if self.table is not None:
            flag, value = self.table.get(key)
            if flag == _LOWER and value > alpha:
                alpha = value
                if alpha >= beta:
                    return alpha
            elif flag == _UPPER and value < beta:
                beta = value
                if alpha >= beta:
                    return beta

        ordered = []
        for rank, col in enumerate(CENTER_FIRST):
            bit = candidates & c4.column_mask(col)
            if bit:
                threats = _popcount(c4.winning_cells(current | bit, mask | bit))
                ordered.append((-threats, rank, bit))
        ordered.sort()

        for _, _, bit in ordered:
            score = -self._negamax(current ^ mask, mask | bit, moves + 1, -beta, -alpha)
            if score >= beta:
                if self.table is not None:
                    self.table.put(key, score, _LOWER)
                return score
            if score > alpha:
                alpha = score

        if self.table is not None:
            self.table.put(key, alpha, _UPPER)
        return alpha

    def _value(self, current: int, mask: int, moves: int) -> int:
        """Exact score for the side to move"""
        if moves >= c4.CELLS:
            return 0
        if _can_win_next(current, mask):
            return win_score(moves + 1)

        lo = -win_score(moves + 2) if moves + 2 <= c4.CELLS else 0
        hi = win_score(moves + 3) if moves + 3 <= c4.CELLS else 0
        while lo < hi:
            med = lo + (hi - lo) // 2
            if med <= 0 and int(lo / 2) < med:
                med = int(lo / 2)
            elif med >= 0 and int(hi / 2) > med:
                med = int(hi / 2)
            result = self._negamax(current, mask, moves, med, med + 1)
            if result <= med:
                hi = result
            else:
                lo = result
        return lo

    # ============================================================================
    # PUBLIC API
    # ============================================================================

    def value(self, state: GameState) -> int:
        """Score of ``state`` for its side to move"""
        self._check_supported(state)
        return self._value(state.boards[state.to_move], state.occupied, state.ply)

    def solve(self, state: GameState) -> QVector:
        """q-vector over the legal moves of a non-terminal Connect Four position"""
        self._check_supported(state)
        if terminal_status(state).is_terminal:
            raise ValueError("Cannot solve a terminal position")

        codec = None
        if self.cache is not None:
            codec = canonical_codec(state)
            cached = self.cache.find_by_codec(codec)
            if cached is not None:
                return cached

        current = state.boards[state.to_move]
        mask = state.occupied
        moves_played = state.ply
        start_nodes = self.node_count

        moves, values = [], []
        for col in range(c4.WIDTH):
            if mask & c4.top_mask(col):
                continue
            bit = (mask + c4.bottom_mask(col)) & c4.column_mask(col)
            if c4.has_four(current | bit):
                score = win_score(moves_played + 1)
            else:
                score = -self._value(current ^ mask, mask | bit, moves_played + 1)
            moves.append(col)
            values.append(score)

        q = QVector(tuple(moves), tuple(values))
        logger.debug(
            f"Solved position at ply {moves_played}: q={q.as_columns()} "
            f"({self.node_count - start_nodes} nodes)"
        )
        if self.cache is not None and codec is not None:
            self.cache.save(codec, q)
        return q

    @staticmethod
    def _check_supported(state: GameState) -> None:
        if state.game is not GameId.CONNECT_FOUR:
            logger.error(f"Solver called on unsupported game {state.game.value}")
            raise UnsupportedGameError(f"Solving {state.game.value} is not supported")


def naive_value(state: GameState) -> int:
    """Unpruned exhaustive negamax score, used as a reference oracle"""

    def search(current: int, mask: int, moves: int) -> int:
        if moves >= c4.CELLS:
            return 0
        children = []
        for col in range(c4.WIDTH):
            if mask & c4.top_mask(col):
                continue
            bit = (mask + c4.bottom_mask(col)) & c4.column_mask(col)
            if c4.has_four(current | bit):
                return win_score(moves + 1)
            children.append(bit)
        return max(-search(current ^ mask, mask | bit, moves + 1) for bit in children)

    return search(state.boards[state.to_move], state.occupied, state.ply)


def naive_solve(state: GameState) -> QVector:
    """q-vector computed by ``naive_value`` on every child"""
    moves, values = [], []
    current = state.boards[state.to_move]
    mask = state.occupied
    for col in range(c4.WIDTH):
        if mask & c4.top_mask(col):
            continue
        bit = (mask + c4.bottom_mask(col)) & c4.column_mask(col)
        if c4.has_four(current | bit):
            score = win_score(state.ply + 1)
        else:
            child = GameState(GameId.CONNECT_FOUR, _child_boards(state, bit), 1 - state.to_move, state.ply + 1)
            score = -naive_value(child)
        moves.append(col)
        values.append(score)
    return QVector(tuple(moves), tuple(values))


def _child_boards(state: GameState, bit: int) -> tuple[int, int]:
    boards = list(state.boards)
    boards[state.to_move] |= bit
    return boards[0], boards[1]


_solver: Optional[ConnectFourSolver] = None


def get_solver() -> ConnectFourSolver:
    """Get or create the process-wide solver (one per worker process)"""
    global _solver

    if _solver is None:
        cache = SolverCacheRepository(SOLVER_CACHE_PATH) if SOLVER_CACHE_PATH else None
        _solver = ConnectFourSolver(SOLVER_TT_LOG2, cache)

    return _solver


def reset_solver():
    """Reset the solver singleton (useful for testing)"""
    global _solver
    _solver = None
