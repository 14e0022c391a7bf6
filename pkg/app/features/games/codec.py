"""
Position text codec.

Connect Four positions are the played columns as 1-based digits
(``"44455554"``). Pentago positions are comma separated moves
``c<cell>-q<quadrant>-<cw|ccw>`` with 0-based cell and quadrant.
"""

import re

from app.errors import IllegalMoveError
from app.features.games import connect_four
from app.features.games.domain import GameId, GameState, PentagoMove, RotationDirection
from app.features.games.engine import replay
from app.features.games.pentago import describe

_PENTAGO_TOKEN = re.compile(r"^c(\d+)-q([0-3])-(cw|ccw)$")


def encode_moves(game: GameId, moves: list[int]) -> str:
    if game is GameId.CONNECT_FOUR:
        return "".join(str(col + 1) for col in moves)
    return ",".join(describe(PentagoMove.from_action(action)) for action in moves)


def decode_moves(game: GameId, text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    if game is GameId.CONNECT_FOUR:
        moves = []
        for ch in text:
            if not ch.isdigit() or not 1 <= int(ch) <= connect_four.WIDTH:
                raise IllegalMoveError(f"Connect Four codec expects digits 1-7, got '{ch}'")
            moves.append(int(ch) - 1)
        return moves

    moves = []
    for token in text.split(","):
        match = _PENTAGO_TOKEN.match(token.strip())
        if not match:
            raise IllegalMoveError(f"Malformed Pentago move '{token}'")
        cell, quadrant, direction = int(match[1]), int(match[2]), match[3]
        if cell >= 36:
            raise IllegalMoveError(f"Pentago cell must be in 0..35, got {cell}")
        rotation = RotationDirection.CW if direction == "cw" else RotationDirection.CCW
        moves.append(PentagoMove(cell, quadrant, rotation).action)
    return moves


def decode_position(game: GameId, text: str) -> GameState:
    return replay(game, decode_moves(game, text))


def canonical_moves(state: GameState) -> list[int]:
    """
    Deterministic Connect Four move sequence reaching ``state``.

    Moves are undone from the top of the lowest eligible column first, with
    backtracking when an intermediate position would already be decided.
    """
    if state.game is not GameId.CONNECT_FOUR:
        raise ValueError("canonical_moves is only defined for Connect Four")

    failed: set[tuple[int, int]] = set()

    def undo(b0: int, b1: int, ply: int) -> list[int] | None:
        if ply == 0:
            return []
        if (b0, b1) in failed:
            return None
        last = (ply - 1) % 2
        occupied = b0 | b1
        for col in range(connect_four.WIDTH):
            column = occupied & connect_four.column_mask(col)
            if not column:
                continue
            top = 1 << (column.bit_length() - 1)
            mine = b0 if last == 0 else b1
            if not mine & top:
                continue
            n0, n1 = (b0 ^ top, b1) if last == 0 else (b0, b1 ^ top)
            if connect_four.has_four(n0) or connect_four.has_four(n1):
                continue
            rest = undo(n0, n1, ply - 1)
            if rest is not None:
                return rest + [col]
        failed.add((b0, b1))
        return None

    moves = undo(state.boards[0], state.boards[1], state.ply)
    if moves is None:
        raise IllegalMoveError("Position is not reachable by legal play")
    return moves


def canonical_codec(state: GameState) -> str:
    return encode_moves(GameId.CONNECT_FOUR, canonical_moves(state))
