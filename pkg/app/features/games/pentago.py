"""
Pentago bitboard rules.

Bit ``row * 6 + col`` with row 0 at the top. Quadrants: 0 top-left,
1 top-right, 2 bottom-left, 3 bottom-right. A move places a token and then
rotates one quadrant; lines are judged only on the board after the rotation.
"""

from app.errors import IllegalMoveError
from app.features.games.domain import (
    DRAW,
    ONGOING,
    GameId,
    GameState,
    Outcome,
    PentagoMove,
    RotationDirection,
    TerminalStatus,
)

SIZE = 6
CELLS = SIZE * SIZE
QUADRANTS = 4
ACTIONS = CELLS * QUADRANTS * 2
FULL_BOARD = (1 << CELLS) - 1


def _bit(row: int, col: int) -> int:
    return row * SIZE + col


def _quadrant_origin(quadrant: int) -> tuple[int, int]:
    return (quadrant // 2) * 3, (quadrant % 2) * 3


def _build_rotations() -> tuple[tuple[int, tuple[tuple[int, int], ...]], ...]:
    """(quadrant mask, (src_bit, dst_bit) pairs) per quadrant*2 + direction"""
    tables = []
    for quadrant in range(QUADRANTS):
        r0, c0 = _quadrant_origin(quadrant)
        mask = 0
        for i in range(3):
            for j in range(3):
                mask |= 1 << _bit(r0 + i, c0 + j)
        for direction in RotationDirection:
            pairs = []
            for i in range(3):
                for j in range(3):
                    if direction is RotationDirection.CW:
                        ni, nj = j, 2 - i
                    else:
                        ni, nj = 2 - j, i
                    pairs.append((_bit(r0 + i, c0 + j), _bit(r0 + ni, c0 + nj)))
            tables.append((mask, tuple(pairs)))
    return tuple(tables)


def _build_lines() -> tuple[int, ...]:
    lines = []
    for a in range(SIZE):
        for start in range(SIZE - 4):
            lines.append(sum(1 << _bit(a, start + k) for k in range(5)))
            lines.append(sum(1 << _bit(start + k, a) for k in range(5)))
    for r in range(SIZE - 4):
        for c in range(SIZE - 4):
            lines.append(sum(1 << _bit(r + k, c + k) for k in range(5)))
            lines.append(sum(1 << _bit(r + k, c + 4 - k) for k in range(5)))
    return tuple(lines)


_ROTATIONS = _build_rotations()
LINES = _build_lines()


def rotate(bits: int, quadrant: int, direction: RotationDirection) -> int:
    mask, pairs = _ROTATIONS[quadrant * 2 + int(direction)]
    rotated = bits & ~mask
    for src, dst in pairs:
        if bits >> src & 1:
            rotated |= 1 << dst
    return rotated


def has_five(bits: int) -> bool:
    for line in LINES:
        if bits & line == line:
            return True
    return False


def initial_state() -> GameState:
    return GameState(GameId.PENTAGO, (0, 0), 0, 0)


def legal_moves(state: GameState) -> list[int]:
    if terminal_status(state).is_terminal:
        return []
    occupied = state.occupied
    moves = []
    for cell in range(CELLS):
        if not occupied >> cell & 1:
            base = cell * 8
            moves.extend(range(base, base + 8))
    return moves


def apply_move(state: GameState, action: int) -> GameState:
    if not 0 <= action < ACTIONS:
        raise IllegalMoveError(f"Pentago action must be in 0..{ACTIONS - 1}, got {action}")
    if terminal_status(state).is_terminal:
        raise IllegalMoveError("Game is already over; no move may be played")
    move = PentagoMove.from_action(action)
    if state.occupied >> move.cell & 1:
        raise IllegalMoveError(f"Cell {move.cell} is already occupied")

    boards = list(state.boards)
    boards[state.to_move] |= 1 << move.cell
    b0 = rotate(boards[0], move.quadrant, move.direction)
    b1 = rotate(boards[1], move.quadrant, move.direction)
    return GameState(GameId.PENTAGO, (b0, b1), 1 - state.to_move, state.ply + 1)


def terminal_status(state: GameState) -> TerminalStatus:
    win0 = has_five(state.boards[0])
    win1 = has_five(state.boards[1])
    if win0 and win1:
        return DRAW
    if win0:
        return TerminalStatus(Outcome.WIN, 0)
    if win1:
        return TerminalStatus(Outcome.WIN, 1)
    if state.occupied == FULL_BOARD:
        return DRAW
    return ONGOING


def cell_bit(row_from_top: int, col: int) -> int:
    return _bit(row_from_top, col)


def describe(move: PentagoMove) -> str:
    return f"c{move.cell}-q{move.quadrant}-{'cw' if move.direction is RotationDirection.CW else 'ccw'}"
