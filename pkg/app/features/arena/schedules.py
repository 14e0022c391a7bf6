"""Pairing schedules"""
import itertools
import logging

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.errors import ConfigError
from app.features.arena.domain import AgentKind, Schedule
from app.features.arena.schemas import AgentSpec

logger = logging.getLogger(__name__)

_MAX_REDRAWS = 1000


def round_robin_pairs(agents: list[str]) -> list[tuple[str, str]]:
    return list(itertools.combinations(agents, 2))


def solver_only_pairs(agents: list[str]) -> list[tuple[str, str]]:
    """Round robin without games between two network agents"""
    kinds = {agent: AgentSpec.parse(agent).kind for agent in agents}
    return [
        (a, b)
        for a, b in round_robin_pairs(agents)
        if not (kinds[a] is AgentKind.NETWORK and kinds[b] is AgentKind.NETWORK)
    ]


def _is_connected(size: int, pairs: list[tuple[int, int]]) -> bool:
    if size <= 1:
        return True
    rows = [i for i, _ in pairs]
    cols = [j for _, j in pairs]
    graph = csr_matrix((np.ones(len(pairs)), (rows, cols)), shape=(size, size))
    count, _ = connected_components(graph, directed=False)
    return count == 1


def sparse_pairs(agents: list[str], degree: int, rng: np.random.Generator) -> list[tuple[str, str]]:
    """
    Random ``degree``-regular pairing graph, redrawn until it is simple and connected.

    Falls back to a round robin when the pool is too small for the degree.
    """
    size = len(agents)
    if degree >= size - 1:
        return round_robin_pairs(agents)
    if (size * degree) % 2:
        raise ConfigError(f"A {degree}-regular pairing of {size} agents does not exist (odd total)", field="degree")

    for _ in range(_MAX_REDRAWS):
        # configuration model: shuffle degree stubs and pair them up
        stubs = rng.permutation(np.repeat(np.arange(size), degree))
        edges = {tuple(sorted((int(stubs[k]), int(stubs[k + 1])))) for k in range(0, len(stubs), 2)}
        simple = len(edges) == size * degree // 2 and all(i != j for i, j in edges)
        if simple and _is_connected(size, sorted(edges)):
            return [(agents[i], agents[j]) for i, j in sorted(edges)]

    logger.warning(f"No connected {degree}-regular pairing found for {size} agents; using round robin")
    return round_robin_pairs(agents)


def build_pairs(agents: list[str], schedule: Schedule, degree: int, rng: np.random.Generator) -> list[tuple[str, str]]:
    if schedule is Schedule.ROUND_ROBIN:
        return round_robin_pairs(agents)
    if schedule is Schedule.SOLVER_ONLY:
        return solver_only_pairs(agents)
    return sparse_pairs(agents, degree, rng)
