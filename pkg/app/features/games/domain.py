"""Domain types shared by the two game engines"""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from app.errors import ConfigError


class GameId(str, Enum):
    """Supported games"""
    CONNECT_FOUR = "connect_four"
    PENTAGO = "pentago"

    @classmethod
    def parse(cls, name: str) -> "GameId":
        normalized = name.strip().lower().replace("-", "_").replace(" ", "_")
        aliases = {"connect4": cls.CONNECT_FOUR, "c4": cls.CONNECT_FOUR}
        if normalized in aliases:
            return aliases[normalized]
        try:
            return cls(normalized)
        except ValueError:
            raise ConfigError(f"Unknown game '{name}'", field="game")


class Outcome(str, Enum):
    ONGOING = "ongoing"
    WIN = "win"
    DRAW = "draw"


class RotationDirection(int, Enum):
    CW = 0
    CCW = 1


@dataclass(frozen=True, slots=True)
class GameState:
    """
    Immutable board position.

    ``boards`` holds one packed bitplane per player (player 0 moves first).
    The bit layout is game specific, see ``connect_four`` and ``pentago``.
    """
    game: GameId
    boards: tuple[int, int]
    to_move: int
    ply: int

    @property
    def occupied(self) -> int:
        return self.boards[0] | self.boards[1]


@dataclass(frozen=True, slots=True)
class TerminalStatus:
    outcome: Outcome
    winner: int | None = None

    @property
    def is_terminal(self) -> bool:
        return self.outcome is not Outcome.ONGOING

    def score_for(self, player: int) -> float:
        """Game score in {0, 0.5, 1} for ``player``; only valid on terminal status"""
        if self.outcome is Outcome.DRAW:
            return 0.5
        return 1.0 if self.winner == player else 0.0


ONGOING = TerminalStatus(Outcome.ONGOING)
DRAW = TerminalStatus(Outcome.DRAW)


class PentagoMove(NamedTuple):
    """Placement cell 0-35, quadrant 0-3 and rotation direction"""
    cell: int
    quadrant: int
    direction: RotationDirection

    @property
    def action(self) -> int:
        return self.cell * 8 + self.quadrant * 2 + int(self.direction)

    @classmethod
    def from_action(cls, action: int) -> "PentagoMove":
        cell, rest = divmod(action, 8)
        quadrant, direction = divmod(rest, 2)
        return cls(cell, quadrant, RotationDirection(direction))


# Per-game dimensions
MAX_PLIES = {GameId.CONNECT_FOUR: 42, GameId.PENTAGO: 36}
ACTION_COUNT = {GameId.CONNECT_FOUR: 7, GameId.PENTAGO: 288}
BOARD_SHAPE = {GameId.CONNECT_FOUR: (6, 7), GameId.PENTAGO: (6, 6)}
OBSERVATION_SIZE = {game: 3 * rows * cols for game, (rows, cols) in BOARD_SHAPE.items()}
