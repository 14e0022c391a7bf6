"""Solver repositories"""
from .solver_cache import SolverCacheRepository

__all__ = ["SolverCacheRepository"]
