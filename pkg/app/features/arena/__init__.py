"""Arena feature: agents, matches, tournaments and Bradley-Terry ratings"""
from .agents import NetworkAgent, RandomAgent, SolverAgent, agent_forward_flops, load_agent
from .domain import ANCHOR_AGENT, ELO_SCALE, AgentKind, Schedule
from .matches import inference_constrained_match, play_match, random_opening, simulations_for_budget
from .rating import RatingTable, expected_score, fit_ratings, log_likelihood
from .schedules import round_robin_pairs, solver_only_pairs, sparse_pairs
from .schemas import AgentSpec, MatchConfig, MatchRecord, RatingEntry
from .service import TournamentSummary, load_matches, run_inference_tournament, run_tournament

__all__ = [
    "ANCHOR_AGENT",
    "ELO_SCALE",
    "AgentKind",
    "AgentSpec",
    "MatchConfig",
    "MatchRecord",
    "NetworkAgent",
    "RandomAgent",
    "RatingEntry",
    "RatingTable",
    "Schedule",
    "SolverAgent",
    "TournamentSummary",
    "agent_forward_flops",
    "expected_score",
    "fit_ratings",
    "inference_constrained_match",
    "load_agent",
    "load_matches",
    "log_likelihood",
    "play_match",
    "random_opening",
    "round_robin_pairs",
    "run_inference_tournament",
    "run_tournament",
    "simulations_for_budget",
    "solver_only_pairs",
    "sparse_pairs",
]
