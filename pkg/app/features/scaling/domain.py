"""Scaling-analysis constants and enums"""

from enum import Enum

from app.features.arena.domain import ELO_SCALE

# Points closer than this to the optimal-play benchmark sit on the plateau
PLATEAU_THRESHOLD = 10.0

MIN_FIT_POINTS = 3

BOOTSTRAP_SAMPLES = 1000

# Reference agents from the literature (approximate published estimates,
# not reproduced here): parameter count and training compute in FLOPs
REFERENCE_POINTS = {
    "alphago_zero": {"params": 46.4e6, "compute": 3.41e23, "source": "literature estimate"},
    "alphazero_go": {"params": 46.4e6, "compute": 3.67e22, "source": "literature estimate"},
}


# Analysis bundle tables
SIZE_TABLE = "fig2_size.csv"
COMPUTE_TABLE = "fig4_compute.csv"
OPTIMAL_SIZE_TABLE = "fig1_optimal.csv"
EFFICIENCY_TABLE = "fig6_efficiency.csv"
TEST_LOSS_TABLE = "fig11_testloss.csv"
CONVERGENCE_TABLE = "exponent_convergence.csv"


class Axis(str, Enum):
    """Resource on the abscissa of a fit"""
    PARAMS = "N"
    COMPUTE = "C"


class Aggregation(str, Enum):
    """``mean``: seed-mean Elo per abscissa value; ``agents``: every agent is a point"""
    MEAN = "mean"
    AGENTS = "agents"


def exponent_from_slope(slope: float) -> float:
    """Elo per decade of resource to the power-law exponent"""
    return slope / ELO_SCALE
