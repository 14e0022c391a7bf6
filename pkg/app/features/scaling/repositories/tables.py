"""CSV tables of the analysis bundle"""
from pathlib import Path
from typing import Optional

from pydantic import BaseModel

from app.features.scaling.schemas import AgentPoint, ConvergenceRow, EfficiencyRow, LossReport
from app.infra.files.repositories.base import CsvRepository


class SizeRow(BaseModel):
    agent_id: str
    width: int
    seed: int
    step: int
    params: int
    elo: float
    excluded: bool
    fitted_elo: Optional[float] = None


class ComputeRow(BaseModel):
    agent_id: str
    width: int
    seed: int
    step: int
    compute: float
    elo: float
    on_front: bool
    excluded: bool
    fitted_elo: Optional[float] = None


class OptimalSizeRow(BaseModel):
    agent_id: str
    compute: float
    params: int
    optimal_params: float


class AgentPointRepository(CsvRepository[AgentPoint]):
    """Joined agent table, the input of every fit"""

    def __init__(self, path: str | Path):
        super().__init__(path, AgentPoint)


class SizeScalingRepository(CsvRepository[SizeRow]):
    def __init__(self, path: str | Path):
        super().__init__(path, SizeRow)


class ComputeScalingRepository(CsvRepository[ComputeRow]):
    def __init__(self, path: str | Path):
        super().__init__(path, ComputeRow)


class OptimalSizeRepository(CsvRepository[OptimalSizeRow]):
    def __init__(self, path: str | Path):
        super().__init__(path, OptimalSizeRow)


class SampleEfficiencyRepository(CsvRepository[EfficiencyRow]):
    def __init__(self, path: str | Path):
        super().__init__(path, EfficiencyRow)


class ExponentConvergenceRepository(CsvRepository[ConvergenceRow]):
    def __init__(self, path: str | Path):
        super().__init__(path, ConvergenceRow)


class HeldOutLossRepository(CsvRepository[LossReport]):
    def __init__(self, path: str | Path):
        super().__init__(path, LossReport)
