"""
Bradley-Terry ratings by minorization-maximization.

Draws count as half a win for each side. Strengths are only defined up to a
common factor, so each connected component of the match graph is anchored:
``random`` when it plays, else the lexicographically first agent.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from app.errors import InsufficientDataError
from app.features.arena.domain import ANCHOR_AGENT, ELO_PER_NAT, ELO_SCALE
from app.features.arena.schemas import MatchRecord, RatingEntry

logger = logging.getLogger(__name__)


def expected_score(r_i: float, r_j: float) -> float:
    """Expected score of a player rated ``r_i`` against one rated ``r_j``"""
    return 1.0 / (1.0 + 10.0 ** ((r_j - r_i) / ELO_SCALE))


@dataclass
class RatingTable:
    entries: dict[str, RatingEntry]
    anchors: list[str]
    components: dict[str, int]
    loglik_history: list[float] = field(default_factory=list)
    excluded: list[str] = field(default_factory=list)
    iterations: int = 0
    converged: bool = True
    virtual_draws: bool = False

    def elo(self, agent_id: str) -> float:
        return self.entries[agent_id].elo

    def gamma(self, agent_id: str) -> float:
        return 10.0 ** (self.entries[agent_id].elo / ELO_SCALE)

    def rows(self) -> list[RatingEntry]:
        return sorted(self.entries.values(), key=lambda entry: (-entry.elo, entry.agent_id))


@dataclass
class _PairCounts:
    agents: list[str]
    wins: np.ndarray  # wins[i, j]: score of i against j, draws as 0.5
    games: np.ndarray  # games[i, j] = games[j, i]


def _count(matches: Iterable[MatchRecord]) -> tuple[_PairCounts, list[str]]:
    played = [m for m in matches if not m.skipped and m.a != m.b]
    named = sorted({m.a for m in matches} | {m.b for m in matches})
    agents = sorted({m.a for m in played} | {m.b for m in played})
    excluded = [agent for agent in named if agent not in set(agents)]

    index = {agent: i for i, agent in enumerate(agents)}
    size = len(agents)
    wins = np.zeros((size, size))
    games = np.zeros((size, size))
    for m in played:
        i, j = index[m.a], index[m.b]
        wins[i, j] += m.score_a
        wins[j, i] += 1.0 - m.score_a
        games[i, j] += 1
        games[j, i] += 1
    return _PairCounts(agents, wins, games), excluded


def log_likelihood(log_gamma: np.ndarray, wins: np.ndarray, games: np.ndarray) -> float:
    diff = log_gamma[:, None] - log_gamma[None, :]
    # log(gamma_i / (gamma_i + gamma_j)) computed stably
    log_p = -np.logaddexp(0.0, -diff)
    return float(np.sum(np.where(games > 0, wins * log_p, 0.0)))


def _needs_virtual_draws(wins: np.ndarray, games: np.ndarray) -> bool:
    """The MLE only exists when every agent beats, directly or not, every other one"""
    beat = csr_matrix((wins > 0) & (games > 0))
    count, _ = connected_components(beat, directed=True, connection="strong")
    return count > 1


def _fit_component(
    wins: np.ndarray, games: np.ndarray, anchor: int, max_iter: int, tol: float
) -> tuple[np.ndarray, list[float], int, bool]:
    """MM iterations for one connected component; returns log-strengths anchored at ``anchor``"""
    size = len(wins)
    total_wins = wins.sum(axis=1)
    log_gamma = np.zeros(size)
    history = [log_likelihood(log_gamma, wins, games)]

    for iteration in range(1, max_iter + 1):
        gamma = np.exp(log_gamma)
        denom = (games / (gamma[:, None] + gamma[None, :])).sum(axis=1)
        updated = np.log(total_wins) - np.log(denom)
        updated -= updated[anchor]
        delta = float(np.max(np.abs(updated - log_gamma)))
        log_gamma = updated
        history.append(log_likelihood(log_gamma, wins, games))
        if delta < tol:
            return log_gamma, history, iteration, True

    return log_gamma, history, max_iter, False


def _fisher_uncertainty(log_gamma: np.ndarray, games: np.ndarray) -> np.ndarray:
    """Elo standard error from the diagonal of the Fisher information"""
    diff = log_gamma[:, None] - log_gamma[None, :]
    p = 1.0 / (1.0 + np.exp(-diff))
    info = (games * p * (1.0 - p)).sum(axis=1)
    with np.errstate(divide="ignore"):
        return np.where(info > 0, ELO_PER_NAT / np.sqrt(info), math.inf)


def fit_ratings(
    matches: Iterable[MatchRecord],
    anchor: Optional[str] = None,
    max_iter: int = 100_000,
    tol: float = 1e-10,
) -> RatingTable:
    """
    Maximum-likelihood Bradley-Terry ratings in Elo units.

    Components of the match graph are fitted separately, each with its own
    anchor at Elo 0. When an agent (or group) won or lost every game against
    the rest of its component, every played pair of that component receives
    one virtual draw so the fit stays finite.

    Raises:
        InsufficientDataError: no played (non-skipped) games
    """
    matches = list(matches)
    counts, excluded = _count(matches)
    if excluded:
        logger.warning(f"Agents with no played games are excluded from the fit: {excluded}")
    if not counts.agents:
        raise InsufficientDataError("No played games to rate")

    n_components, labels = connected_components(csr_matrix(counts.games > 0), directed=False)
    if n_components > 1:
        logger.warning(f"Match graph has {n_components} disconnected components; fitting each separately")

    entries: dict[str, RatingEntry] = {}
    anchors: list[str] = []
    components: dict[str, int] = {}
    history: list[float] = []
    total_iterations = 0
    converged = True
    used_virtual = False

    for component in range(n_components):
        members = np.flatnonzero(labels == component)
        names = [counts.agents[i] for i in members]
        wins = counts.wins[np.ix_(members, members)]
        games = counts.games[np.ix_(members, members)]

        if len(members) > 1 and _needs_virtual_draws(wins, games):
            logger.warning(
                f"Component {component} has a perfect or zero score subgroup; adding one virtual draw per pair"
            )
            played = games > 0
            wins = wins + 0.5 * played
            games = games + played
            used_virtual = True

        if anchor is not None and anchor in names:
            anchor_name = anchor
        elif ANCHOR_AGENT in names:
            anchor_name = ANCHOR_AGENT
        else:
            anchor_name = min(names)
        anchor_index = names.index(anchor_name)
        anchors.append(anchor_name)

        if len(members) == 1:
            log_gamma, comp_history, iterations, ok = np.zeros(1), [0.0], 0, True
        else:
            log_gamma, comp_history, iterations, ok = _fit_component(wins, games, anchor_index, max_iter, tol)
        if not ok:
            logger.warning(f"Rating fit of component {component} stopped after {max_iter} iterations")
        converged = converged and ok
        total_iterations = max(total_iterations, iterations)
        if not history:
            history = comp_history
        else:
            history = _sum_histories(history, comp_history)

        uncertainty = _fisher_uncertainty(log_gamma, games)
        for k, name in enumerate(names):
            entries[name] = RatingEntry(
                agent_id=name,
                elo=float(ELO_PER_NAT * log_gamma[k]),
                games=int(counts.games[members[k]].sum()),
                uncertainty=float(uncertainty[k]),
            )
            components[name] = component

    logger.info(
        f"Rated {len(entries)} agents from {sum(1 for m in matches if not m.skipped)} games "
        f"in {total_iterations} iterations"
    )
    return RatingTable(
        entries=entries,
        anchors=anchors,
        components=components,
        loglik_history=history,
        excluded=excluded,
        iterations=total_iterations,
        converged=converged,
        virtual_draws=used_virtual,
    )


def _sum_histories(a: list[float], b: list[float]) -> list[float]:
    """Total log-likelihood per iteration; finished components keep their last value"""
    length = max(len(a), len(b))
    a = a + [a[-1]] * (length - len(a))
    b = b + [b[-1]] * (length - len(b))
    return [x + y for x, y in zip(a, b)]
