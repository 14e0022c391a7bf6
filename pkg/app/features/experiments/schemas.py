"""Sweep configuration and manifest"""
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.features.experiments.domain import RunStatus
from app.features.games.domain import GameId
from app.features.training.schemas import TrainRunConfig


def _int_list(value):
    if isinstance(value, str):
        return [int(part) for part in value.replace(";", ",").split(",") if part.strip()]
    return value


class SweepConfig(TrainRunConfig):
    """
    A grid of training runs over widths and seeds. Every other key is a
    training hyperparameter shared by all runs; ``width`` and ``seed`` are
    taken from the grid.
    """
    experiment: str = Field(
        ..., min_length=1, pattern=r"^[A-Za-z0-9_.-]+$", description="Experiment id: name of the sweep directory"
    )
    widths: list[int] = Field(..., min_length=1, description="Hidden layer widths of the grid")
    seeds: list[int] = Field(default_factory=lambda: [0], description="Seeds of the grid")

    @field_validator("widths", "seeds", mode="before")
    @classmethod
    def parse_grid(cls, value):
        return _int_list(value)

    @model_validator(mode="after")
    def check_grid(self) -> "SweepConfig":
        if len(set(self.widths)) != len(self.widths) or len(set(self.seeds)) != len(self.seeds):
            raise ValueError("widths and seeds must not repeat")
        if min(self.widths) < 1:
            raise ValueError("widths must be positive")
        return self

    def run_config(self, width: int, seed: int) -> TrainRunConfig:
        data = self.model_dump(exclude={"experiment", "widths", "seeds"})
        data.update(width=width, seed=seed)
        return TrainRunConfig.model_validate(data)


class ManifestRun(BaseModel):
    width: int
    seed: int
    run_dir: str
    status: RunStatus = RunStatus.PENDING
    steps: int = 0
    error: Optional[str] = None


class ExperimentManifest(BaseModel):
    """Runs of one sweep; (width, seed) pairs are unique"""
    experiment: str
    game: GameId
    widths: list[int]
    seeds: list[int]
    training_steps: int
    runs: list[ManifestRun]

    @model_validator(mode="after")
    def check_unique(self) -> "ExperimentManifest":
        keys = [(run.width, run.seed) for run in self.runs]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (width, seed) run in manifest")
        return self

    def find(self, width: int, seed: int) -> Optional[ManifestRun]:
        return next((run for run in self.runs if run.width == width and run.seed == seed), None)

    def with_status(self, status: RunStatus) -> list[ManifestRun]:
        return [run for run in self.runs if run.status is status]

    def checkpoint_dirs(self) -> list[Path]:
        return [Path(run.run_dir) / "checkpoints" for run in self.runs]
