"""Domain types for Monte Carlo tree search"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np
from pydantic import BaseModel, Field, field_validator

from app.features.games.domain import GameId

# Temperature and drop used for rated matches
MATCH_TEMPERATURE = 0.25

DEFAULT_TEMPERATURE_DROP = {GameId.CONNECT_FOUR: 15, GameId.PENTAGO: 5}


class ProvenStatus(str, Enum):
    """Exact game value for the side to move at a node"""
    UNPROVEN = "unproven"
    WIN = "win"
    DRAW = "draw"
    LOSS = "loss"

    @property
    def is_proven(self) -> bool:
        return self is not ProvenStatus.UNPROVEN

    def flipped(self) -> "ProvenStatus":
        if self is ProvenStatus.WIN:
            return ProvenStatus.LOSS
        if self is ProvenStatus.LOSS:
            return ProvenStatus.WIN
        return self

    def score(self) -> float:
        """+1 / 0 / -1 for the side to move; only valid on proven statuses"""
        return {ProvenStatus.WIN: 1.0, ProvenStatus.DRAW: 0.0, ProvenStatus.LOSS: -1.0}[self]


class SearchConfig(BaseModel):
    c_uct: float = Field(2.0, ge=0)
    max_simulations: int = Field(300, ge=1)
    dirichlet_epsilon: float = Field(0.25, ge=0, le=1)
    dirichlet_alpha: float = Field(1.0, gt=0)
    temperature: float = Field(1.0, ge=0)
    # turn index from which move selection is greedy; inf keeps the temperature
    temperature_drop: float = Field(15, ge=0)
    proven_values: bool = True
    reuse_tree: bool = False

    @field_validator("temperature_drop", mode="before")
    @classmethod
    def parse_infinity(cls, value):
        if isinstance(value, str) and value.strip().lower() in {"inf", "infinity"}:
            return math.inf
        return value

    @classmethod
    def for_training(cls, game: GameId, **overrides) -> "SearchConfig":
        overrides.setdefault("temperature_drop", DEFAULT_TEMPERATURE_DROP[game])
        return cls(**overrides)

    @classmethod
    def for_matches(cls, max_simulations: int = 300, **overrides) -> "SearchConfig":
        """Low temperature that never drops, and no root noise"""
        return cls(
            max_simulations=max_simulations,
            temperature=MATCH_TEMPERATURE,
            temperature_drop=math.inf,
            dirichlet_epsilon=0.0,
            **overrides,
        )


@dataclass
class SearchResult:
    """
    Outcome of one search from a root position.

    ``policy[i]`` and ``visits[i]`` belong to ``moves[i]``; ``root_value``
    is from the perspective of the side to move at the root.
    """
    moves: list[int]
    visits: np.ndarray
    policy: np.ndarray
    root_value: float
    proven: ProvenStatus
    simulations: int
    evaluations: int
    terminal_evaluations: int
    root: Any = field(default=None, repr=False)

    def full_policy(self, action_count: int) -> np.ndarray:
        """Policy scattered over the whole action space"""
        out = np.zeros(action_count, dtype=np.float32)
        out[self.moves] = self.policy
        return out
