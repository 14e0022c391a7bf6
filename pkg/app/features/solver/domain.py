"""Domain types for the Connect Four solver"""

import math
from dataclasses import dataclass

from pydantic import BaseModel, Field, field_validator

from app.features.games.connect_four import CELLS, WIDTH

# Marks an unplayable column in serialized q-vectors
ILLEGAL_Q = -99

# Score of winning with the stone placed at overall ply ``n`` is CELLS - n
MAX_Q = CELLS - 1


@dataclass(frozen=True)
class QVector:
    """
    Per-move solver scores.

    ``values[i]`` belongs to ``moves[i]``: 42 minus the ply of the forced win,
    negated when the mover loses, 0 for a forced draw.
    """
    moves: tuple[int, ...]
    values: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def best(self) -> int:
        return max(self.values)

    def optimal_moves(self) -> tuple[int, ...]:
        best = self.best
        return tuple(move for move, value in zip(self.moves, self.values) if value == best)

    def as_columns(self) -> list[int]:
        """Length-7 list with ILLEGAL_Q for unplayable columns"""
        columns = [ILLEGAL_Q] * WIDTH
        for move, value in zip(self.moves, self.values):
            columns[move] = value
        return columns

    @classmethod
    def from_columns(cls, columns: list[int]) -> "QVector":
        pairs = [(col, value) for col, value in enumerate(columns) if value != ILLEGAL_Q]
        return cls(tuple(col for col, _ in pairs), tuple(value for _, value in pairs))


class SolverAgentConfig(BaseModel):
    """Softmax temperature applied to the q-vector; ``inf`` plays uniformly"""
    temperature: float = Field(0.0, ge=0)

    @field_validator("temperature", mode="before")
    @classmethod
    def parse_infinity(cls, value):
        if isinstance(value, str) and value.strip().lower() in {"inf", "infinity", "∞"}:
            return math.inf
        return value

    @property
    def label(self) -> str:
        if math.isinf(self.temperature):
            return "inf"
        return f"{self.temperature:g}"


class SolvedPosition(BaseModel):
    """One solver cache record"""
    codec: str
    q: list[int]
