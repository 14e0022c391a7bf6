"""
Connect Four bitboard rules.

Bit layout is column-major with one sentinel bit on top of every column:
bit ``col * 7 + row`` with row 0 at the floor. The sentinel row keeps shifted
line checks from wrapping into the next column.
"""

from app.errors import IllegalMoveError
from app.features.games.domain import DRAW, ONGOING, GameId, GameState, Outcome, TerminalStatus

WIDTH = 7
HEIGHT = 6
STRIDE = HEIGHT + 1
CELLS = WIDTH * HEIGHT

BOTTOM = sum(1 << (col * STRIDE) for col in range(WIDTH))
BOARD_MASK = BOTTOM * ((1 << HEIGHT) - 1)

_COLUMN_MASKS = tuple(((1 << HEIGHT) - 1) << (col * STRIDE) for col in range(WIDTH))
_TOP_MASKS = tuple(1 << (HEIGHT - 1 + col * STRIDE) for col in range(WIDTH))
_BOTTOM_MASKS = tuple(1 << (col * STRIDE) for col in range(WIDTH))

# vertical, horizontal, and both diagonals
_DIRECTIONS = (1, STRIDE, STRIDE - 1, STRIDE + 1)


def column_mask(col: int) -> int:
    return _COLUMN_MASKS[col]


def top_mask(col: int) -> int:
    return _TOP_MASKS[col]


def bottom_mask(col: int) -> int:
    return _BOTTOM_MASKS[col]


def has_four(bits: int) -> bool:
    for shift in _DIRECTIONS:
        pairs = bits & (bits >> shift)
        if pairs & (pairs >> (2 * shift)):
            return True
    return False


def winning_cells(bits: int, occupied: int) -> int:
    """Empty cells (anywhere, not only playable) that would complete four for ``bits``"""
    # vertical
    r = (bits << 1) & (bits << 2) & (bits << 3)

    for shift in (STRIDE, STRIDE - 1, STRIDE + 1):
        p = (bits << shift) & (bits << (2 * shift))
        r |= p & (bits << (3 * shift))
        r |= p & (bits >> shift)
        p = (bits >> shift) & (bits >> (2 * shift))
        r |= p & (bits << shift)
        r |= p & (bits >> (3 * shift))

    return r & (BOARD_MASK ^ occupied)


def playable_cells(occupied: int) -> int:
    """Bitmask of the next free cell of every non-full column"""
    return (occupied + BOTTOM) & BOARD_MASK


def initial_state() -> GameState:
    return GameState(GameId.CONNECT_FOUR, (0, 0), 0, 0)


def legal_moves(state: GameState) -> list[int]:
    if terminal_status(state).is_terminal:
        return []
    occupied = state.occupied
    return [col for col in range(WIDTH) if not occupied & _TOP_MASKS[col]]


def apply_move(state: GameState, col: int) -> GameState:
    if not 0 <= col < WIDTH:
        raise IllegalMoveError(f"Connect Four column must be in 0..{WIDTH - 1}, got {col}")
    if terminal_status(state).is_terminal:
        raise IllegalMoveError("Game is already over; no move may be played")
    occupied = state.occupied
    if occupied & _TOP_MASKS[col]:
        raise IllegalMoveError(f"Column {col} is full")

    placed = (occupied + _BOTTOM_MASKS[col]) & _COLUMN_MASKS[col]
    boards = list(state.boards)
    boards[state.to_move] |= placed
    return GameState(GameId.CONNECT_FOUR, (boards[0], boards[1]), 1 - state.to_move, state.ply + 1)


def terminal_status(state: GameState) -> TerminalStatus:
    # Only the player who just moved can own a fresh line
    last = 1 - state.to_move
    if state.ply and has_four(state.boards[last]):
        return TerminalStatus(Outcome.WIN, last)
    if has_four(state.boards[state.to_move]):
        return TerminalStatus(Outcome.WIN, state.to_move)
    if state.ply >= CELLS:
        return DRAW
    return ONGOING


def cell_bit(row_from_top: int, col: int) -> int:
    """Bit index of a cell addressed the way observations are laid out"""
    return col * STRIDE + (HEIGHT - 1 - row_from_top)


def is_winning_move(state: GameState, col: int) -> bool:
    """True if dropping in ``col`` completes four for the side to move"""
    occupied = state.occupied
    if occupied & _TOP_MASKS[col]:
        return False
    placed = (occupied + _BOTTOM_MASKS[col]) & _COLUMN_MASKS[col]
    return has_four(state.boards[state.to_move] | placed)


def column_heights(state: GameState) -> list[int]:
    occupied = state.occupied
    return [bin(occupied & _COLUMN_MASKS[col]).count("1") for col in range(WIDTH)]
