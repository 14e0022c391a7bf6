"""Scaling-analysis feature: size, compute and optimal-size laws, sample efficiency, test loss"""
from .domain import PLATEAU_THRESHOLD, REFERENCE_POINTS, TEST_LOSS_TABLE, Aggregation, Axis
from .efficiency import geometric_mean, sample_efficiency_table
from .fits import (
    bootstrap_exponent,
    expected_score_from_resources,
    exponent_convergence,
    fit_compute_scaling,
    fit_size_scaling,
    optimal_size_law,
    pareto_front,
    predicted_elo_gap,
    seed_mean_points,
)
from .points import build_agent_points, load_agent_points
from .schemas import (
    AgentPoint,
    BootstrapInterval,
    ExponentSeries,
    LossReport,
    OptimalSizeLaw,
    ParetoFront,
    SampleEfficiency,
    ScalingFit,
)
from .service import ScalingAnalysis, analyze, export_bundle, write_reference_points
from .test_set import SolverTestSet, build_solver_test_set, eval_test_loss, prediction_losses

__all__ = [
    "PLATEAU_THRESHOLD",
    "REFERENCE_POINTS",
    "TEST_LOSS_TABLE",
    "AgentPoint",
    "Aggregation",
    "Axis",
    "BootstrapInterval",
    "ExponentSeries",
    "LossReport",
    "OptimalSizeLaw",
    "ParetoFront",
    "SampleEfficiency",
    "ScalingAnalysis",
    "ScalingFit",
    "SolverTestSet",
    "analyze",
    "bootstrap_exponent",
    "build_agent_points",
    "build_solver_test_set",
    "eval_test_loss",
    "expected_score_from_resources",
    "export_bundle",
    "exponent_convergence",
    "fit_compute_scaling",
    "fit_size_scaling",
    "geometric_mean",
    "load_agent_points",
    "optimal_size_law",
    "pareto_front",
    "predicted_elo_gap",
    "prediction_losses",
    "sample_efficiency_table",
    "seed_mean_points",
    "write_reference_points",
]
