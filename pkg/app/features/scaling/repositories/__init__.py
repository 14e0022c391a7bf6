"""Scaling-analysis repositories"""
from .tables import (
    AgentPointRepository,
    ComputeRow,
    ComputeScalingRepository,
    ExponentConvergenceRepository,
    HeldOutLossRepository,
    OptimalSizeRepository,
    OptimalSizeRow,
    SampleEfficiencyRepository,
    SizeRow,
    SizeScalingRepository,
)

__all__ = [
    "AgentPointRepository",
    "ComputeRow",
    "ComputeScalingRepository",
    "ExponentConvergenceRepository",
    "HeldOutLossRepository",
    "OptimalSizeRepository",
    "OptimalSizeRow",
    "SampleEfficiencyRepository",
    "SizeRow",
    "SizeScalingRepository",
]
