"""Scaling-analysis models"""
import math
from typing import Optional

from pydantic import BaseModel, Field

from app.features.games.domain import GameId
from app.features.scaling.domain import Aggregation, Axis


class AgentPoint(BaseModel):
    """A rated checkpoint with its size, compute and data usage"""
    agent_id: str
    game: GameId = GameId.CONNECT_FOUR
    width: int
    seed: int
    step: int
    params: int = Field(..., gt=0)
    compute: float = Field(..., gt=0)
    states: int = 0
    elo: float
    # Elo below the optimal-play benchmark (None when unknown)
    solver_gap: Optional[float] = None

    def resource(self, axis: Axis) -> float:
        return float(self.params) if axis is Axis.PARAMS else self.compute


class ScalingFit(BaseModel):
    """Least-squares line Elo = slope * log10(x) + intercept"""
    axis: Axis
    slope: float
    exponent: float
    intercept: float
    points: int
    excluded: list[str] = Field(default_factory=list)
    residual_rms: float = 0.0
    max_residual: float = 0.0
    pearson_r: float = 1.0
    stderr: float = 0.0
    aggregation: Aggregation = Aggregation.MEAN

    def predict(self, x: float) -> float:
        return self.slope * math.log10(x) + self.intercept


class ParetoFront(BaseModel):
    """Agents ordered by compute, each the strongest among agents with at most its compute"""
    members: list[AgentPoint]

    def __len__(self) -> int:
        return len(self.members)

    @property
    def ids(self) -> list[str]:
        return [member.agent_id for member in self.members]


class OptimalSizeLaw(BaseModel):
    """N_opt(C) = (C / c0) ** exponent"""
    exponent: float
    c0: float
    alpha_n: float
    alpha_c: float
    members: list[str] = Field(default_factory=list)

    def optimal_params(self, compute: float) -> float:
        return (compute / self.c0) ** self.exponent


class BootstrapInterval(BaseModel):
    axis: Axis
    estimate: float
    low: float
    high: float
    confidence: float
    samples: int


class EfficiencyRow(BaseModel):
    """Seed-aggregated point of one width's learning curve"""
    width: int
    step: int
    states: float
    elo: float
    seeds: int


class FrontDataRow(BaseModel):
    """Data usage of a width's agents on the compute Pareto front"""
    width: int
    agents: int
    states_geomean: float


class SampleEfficiency(BaseModel):
    curves: list[EfficiencyRow]
    front_data: list[FrontDataRow]
    # larger widths reach higher Elo at every shared step
    larger_more_efficient: bool


class ConvergenceRow(BaseModel):
    step: int
    slope: float
    exponent: float
    pearson_r: float
    points: int


class ExponentSeries(BaseModel):
    rows: list[ConvergenceRow]
    increasing: bool
    non_decreasing: bool

    @property
    def exponents(self) -> list[float]:
        return [row.exponent for row in self.rows]


class LossReport(BaseModel):
    """Losses on a solver-annotated test set, without regularization"""
    states: int
    value_loss: float
    policy_loss: float
    irreducible_loss: float
    policy_excess: float
    draw_value_loss: float
    uniform_policy_loss: float
    agent_id: Optional[str] = None
