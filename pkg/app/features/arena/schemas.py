"""Arena schemas: agent specs, match config and records, rating rows"""

import math
import re
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.errors import ConfigError
from app.features.arena.domain import AgentKind
from app.features.games.domain import GameId
from app.features.search.domain import MATCH_TEMPERATURE

_SIMS_SUFFIX = re.compile(r"^(?P<path>.+?)@sims=(?P<sims>\d+)$")


class AgentSpec(BaseModel):
    """
    Parsed agent id: ``random``, ``solver:<T>`` (``solver:inf`` allowed) or
    ``net:<checkpoint>`` with an optional ``@sims=<n>`` suffix.
    """
    model_config = ConfigDict(frozen=True)

    id: str
    kind: AgentKind
    temperature: Optional[float] = None
    checkpoint: Optional[str] = None
    simulations: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "AgentSpec":
        """
        Raises:
            ConfigError: unknown agent kind or malformed parameters
        """
        text = text.strip()
        if text == AgentKind.RANDOM.value:
            return cls(id=text, kind=AgentKind.RANDOM)

        kind, _, rest = text.partition(":")
        if kind == AgentKind.SOLVER.value and rest:
            try:
                temperature = math.inf if rest.lower() in {"inf", "infinity"} else float(rest)
            except ValueError:
                raise ConfigError(f"Invalid solver temperature in agent '{text}'", field="agent")
            if temperature < 0:
                raise ConfigError(f"Solver temperature must be >= 0 in agent '{text}'", field="agent")
            return cls(id=text, kind=AgentKind.SOLVER, temperature=temperature)

        if kind == AgentKind.NETWORK.value and rest:
            match = _SIMS_SUFFIX.match(rest)
            if match:
                return cls(
                    id=text,
                    kind=AgentKind.NETWORK,
                    checkpoint=match["path"],
                    simulations=int(match["sims"]),
                )
            return cls(id=text, kind=AgentKind.NETWORK, checkpoint=rest)

        raise ConfigError(f"Unknown agent '{text}' (expected random, solver:<T> or net:<path>)", field="agent")


class MatchConfig(BaseModel):
    """Rated-match settings: low constant temperature, no root noise"""
    game: GameId = GameId.CONNECT_FOUR
    temperature: float = Field(MATCH_TEMPERATURE, gt=0)
    simulations: int = Field(300, ge=1)
    games_per_pair: int = Field(2, ge=1)
    seed: int = 0
    # random opening plies played before the agents take over (0 = empty board)
    opening_plies: int = Field(0, ge=0)
    sparse_degree: int = Field(4, ge=1)


class MatchRecord(BaseModel):
    """One game; ``score_a`` is 1, 0.5 or 0 for agent ``a``"""
    a: str
    b: str
    score_a: float
    seed: int
    transcript: str
    sims_a: Optional[int] = None
    sims_b: Optional[int] = None
    game_index: int = 0
    first: Literal["a", "b"] = "a"
    skipped: bool = False
    flagged: bool = False
    budget: Optional[int] = None

    @property
    def score_b(self) -> float:
        return 1.0 - self.score_a

    @property
    def key(self) -> tuple[str, str, int, Optional[int]]:
        return self.a, self.b, self.game_index, self.budget


class RatingEntry(BaseModel):
    """One row of the ratings CSV"""
    agent_id: str
    elo: float
    games: int
    uncertainty: float
