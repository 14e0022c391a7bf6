"""Exact Connect Four solver feature module"""

from app.features.solver.domain import ILLEGAL_Q, QVector, SolverAgentConfig
from app.features.solver.negamax import (
    ConnectFourSolver,
    get_solver,
    naive_solve,
    naive_value,
    reset_solver,
    win_score,
)
from app.features.solver.policy import solver_agent_move, solver_policy

__all__ = [
    "ILLEGAL_Q",
    "QVector",
    "SolverAgentConfig",
    "ConnectFourSolver",
    "get_solver",
    "naive_solve",
    "naive_value",
    "reset_solver",
    "win_score",
    "solver_agent_move",
    "solver_policy",
]
