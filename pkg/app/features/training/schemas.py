"""Training run configuration and record schemas"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from app.errors import ConfigError
from app.features.games.domain import GameId
from app.features.network.domain import Architecture
from app.features.network.optimizer import OptimizerConfig
from app.features.search.domain import DEFAULT_TEMPERATURE_DROP, SearchConfig


def default_checkpoint_steps(total_steps: int) -> list[int]:
    """{1, 2, 5} x 10^k up to ``total_steps``, always ending at ``total_steps``"""
    steps = set()
    decade = 1
    while decade <= total_steps:
        for mantissa in (1, 2, 5):
            if mantissa * decade <= total_steps:
                steps.add(mantissa * decade)
        decade *= 10
    steps.add(total_steps)
    return sorted(steps)


class TrainRunConfig(BaseModel):
    """
    One training run. Field names are the keys of the run config file;
    defaults are the reference hyperparameters.
    """
    model_config = ConfigDict(extra="forbid")

    game: GameId = Field(GameId.CONNECT_FOUR, description="Game: connect_four or pentago")
    width: int = Field(16, ge=1, description="Hidden layer width: neurons in every hidden layer")
    seed: int = Field(0, description="Seed: the single source of randomness of the run")
    training_steps: int = Field(10_000, ge=1, description="Training steps: number of optimization steps")

    # search
    c_uct: float = Field(2.0, ge=0, description="c_uct: MCTS exploration constant")
    max_simulations: int = Field(300, ge=1, description="Max simulations: number of MCTS steps to run per move")
    policy_epsilon: float = Field(0.25, ge=0, le=1, description="Policy epsilon: policy noise")
    policy_alpha: float = Field(1.0, gt=0, description="Policy alpha: Dirichlet noise variable")
    temperature: float = Field(
        1.0, ge=0, description="Temperature: temperature applied to the policy for final move selection"
    )
    temperature_drop: Optional[int] = Field(
        None, ge=0, description="Temperature drop: number of turns before temperature is set to 0 (default per game)"
    )
    proven_values: bool = Field(True, description="Proven values: stop searching positions solved in the tree")

    # optimization
    batch_size: int = Field(1024, ge=1, description="Batch size: batch size during optimization steps")
    replay_buffer_size: int = Field(
        2 ** 16, ge=1, description="Replay-buffer size: number of game states stored in the replay buffer"
    )
    replay_buffer_reuse: int = Field(
        10,
        ge=1,
        description=(
            "Replay-buffer reuse: number of optimization steps a game state stays in the buffer before it is erased"
        ),
    )
    learning_rate: float = Field(1e-3, gt=0, description="Learning rate: optimization learning rate")
    weight_decay: float = Field(1e-4, ge=0, description="Weight decay: L2 regularization strength")

    # bookkeeping
    checkpoint_steps: Optional[list[int]] = Field(None, description="Checkpoint steps (default log-spaced)")
    games_per_round: int = Field(8, ge=1, description="Self-play games between optimization steps")

    @field_validator("game", mode="before")
    @classmethod
    def parse_game(cls, value):
        if isinstance(value, str):
            try:
                return GameId.parse(value)
            except ConfigError as e:
                raise ValueError(e.detail)
        return value

    @field_validator("checkpoint_steps", mode="before")
    @classmethod
    def parse_steps(cls, value):
        if isinstance(value, str):
            return [int(part) for part in value.replace(";", ",").split(",") if part.strip()]
        return value

    @model_validator(mode="after")
    def check_consistency(self) -> "TrainRunConfig":
        if self.replay_buffer_size // self.replay_buffer_reuse < 1:
            raise ValueError("replay_buffer_size / replay_buffer_reuse must be at least 1")
        if self.batch_size > self.replay_buffer_size:
            raise ValueError("batch_size cannot exceed replay_buffer_size")
        if self.checkpoint_steps is not None:
            bad = [step for step in self.checkpoint_steps if not 1 <= step <= self.training_steps]
            if bad:
                raise ValueError(f"checkpoint steps outside 1..training_steps: {bad}")
        return self

    # ============================================================================
    # DERIVED VALUES
    # ============================================================================

    @property
    def data_per_step(self) -> int:
        """D: new states that trigger one optimization step (floor of capacity / reuse)"""
        return self.replay_buffer_size // self.replay_buffer_reuse

    @property
    def effective_temperature_drop(self) -> int:
        if self.temperature_drop is not None:
            return self.temperature_drop
        return DEFAULT_TEMPERATURE_DROP[self.game]

    def schedule(self) -> list[int]:
        steps = self.checkpoint_steps or default_checkpoint_steps(self.training_steps)
        return sorted(set(steps) | {self.training_steps})

    def architecture(self) -> Architecture:
        return Architecture.for_game(self.game, self.width)

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            c_uct=self.c_uct,
            max_simulations=self.max_simulations,
            dirichlet_epsilon=self.policy_epsilon,
            dirichlet_alpha=self.policy_alpha,
            temperature=self.temperature,
            temperature_drop=self.effective_temperature_drop,
            proven_values=self.proven_values,
        )

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(learning_rate=self.learning_rate, weight_decay=self.weight_decay)


class LedgerEntry(BaseModel):
    """Compute and data accounting at one checkpoint; C = S * T * F * D"""
    step: int
    S: int
    T: int
    F: int
    D: int
    C: int
    states: int
    games: int
    evaluations: int


class SelfPlayRecord(BaseModel):
    game_index: int
    length: int
    outcome: str
    first_player_score: float


class RunSummary(BaseModel):
    run_dir: str
    steps: int
    games: int
    states: int
    checkpoints: list[int]
    completed: bool
