"""
PUCT Monte Carlo tree search with proven-value propagation.

Each node keeps per-child arrays (prior, visit count, value sum). Child value
sums are stored from the perspective of the side to move at the parent, so
Q(child) can be read directly when selecting. Children are created the first
time they are selected. Exactly decided positions (terminal, or solved from
their children) carry a ProvenStatus that overrides Q and stops the search
once the root itself is decided.
"""
import logging
import math
from typing import Optional

import numpy as np

from app.features.games.domain import GameState, Outcome
from app.features.games.engine import apply_move, legal_moves, terminal_status
from app.features.search.domain import ProvenStatus, SearchConfig, SearchResult
from app.features.search.evaluators import Evaluator

logger = logging.getLogger(__name__)


class Node:
    __slots__ = (
        "state",
        "moves",
        "priors",
        "child_visits",
        "child_value",
        "child_proven",
        "children",
        "visits",
        "proven",
    )

    def __init__(self, state: GameState, moves: list[int], priors: np.ndarray):
        self.state = state
        self.moves = moves
        self.priors = priors
        self.child_visits = np.zeros(len(moves), dtype=np.int64)
        self.child_value = np.zeros(len(moves), dtype=np.float64)
        self.child_proven: list[ProvenStatus] = [ProvenStatus.UNPROVEN] * len(moves)
        self.children: list[Optional["Node"]] = [None] * len(moves)
        self.visits = 1
        self.proven = ProvenStatus.UNPROVEN

    def q_values(self, proven_values: bool) -> np.ndarray:
        """Mean child values for the side to move here; unvisited children are 0"""
        q = np.divide(
            self.child_value,
            self.child_visits,
            out=np.zeros_like(self.child_value),
            where=self.child_visits > 0,
        )
        if proven_values:
            for i, status in enumerate(self.child_proven):
                if status.is_proven:
                    # child status is for the opponent
                    q[i] = -status.score()
        return q

    def select(self, c_uct: float, proven_values: bool) -> int:
        """Index of the child maximising Q + U; ties go to the lowest index"""
        q = self.q_values(proven_values)
        u = c_uct * self.priors * math.sqrt(self.visits) / (1.0 + self.child_visits)
        return int(np.argmax(q + u))

    def derive_proven(self) -> ProvenStatus:
        if any(status is ProvenStatus.LOSS for status in self.child_proven):
            return ProvenStatus.WIN
        if all(status.is_proven for status in self.child_proven):
            if any(status is ProvenStatus.DRAW for status in self.child_proven):
                return ProvenStatus.DRAW
            return ProvenStatus.LOSS
        return ProvenStatus.UNPROVEN


def apply_dirichlet_noise(
    prior: np.ndarray, epsilon: float, alpha: float, rng: np.random.Generator
) -> np.ndarray:
    """(1 - epsilon) * prior + epsilon * Dirichlet(alpha) over the same moves"""
    prior = np.asarray(prior, dtype=np.float64)
    if epsilon == 0:
        return prior.copy()
    noise = rng.dirichlet(np.full(len(prior), alpha))
    mixed = (1.0 - epsilon) * prior + epsilon * noise
    return mixed / mixed.sum()


def _terminal_proven(child_state: GameState) -> ProvenStatus:
    """Status of a decided child position for its side to move"""
    status = terminal_status(child_state)
    if status.outcome is Outcome.ONGOING:
        return ProvenStatus.UNPROVEN
    if status.outcome is Outcome.DRAW:
        return ProvenStatus.DRAW
    return ProvenStatus.WIN if status.winner == child_state.to_move else ProvenStatus.LOSS


class _SearchRun:
    """State of one search call (counters and the evaluator)"""

    def __init__(self, evaluator: Evaluator, cfg: SearchConfig):
        self.evaluator = evaluator
        self.cfg = cfg
        self.evaluations = 0
        self.terminal_evaluations = 0

    def expand(self, state: GameState) -> tuple[Node, float]:
        moves = legal_moves(state)
        priors, value = self.evaluator(state, moves)
        self.evaluations += 1
        return Node(state, moves, np.asarray(priors, dtype=np.float64)), value

    def simulate(self, root: Node) -> None:
        path: list[tuple[Node, int]] = []
        node = root
        proven_values = self.cfg.proven_values

        while True:
            index = node.select(self.cfg.c_uct, proven_values)
            path.append((node, index))
            status = node.child_proven[index]

            if status.is_proven and (proven_values or node.children[index] is None):
                if node.children[index] is None:
                    self.terminal_evaluations += 1
                value = -status.score()
                break

            child = node.children[index]
            if child is None:
                child_state = apply_move(node.state, node.moves[index])
                terminal = _terminal_proven(child_state)
                if terminal.is_proven:
                    self.terminal_evaluations += 1
                    node.child_proven[index] = terminal
                    value = -terminal.score()
                else:
                    child, child_value = self.expand(child_state)
                    node.children[index] = child
                    value = -child_value
                break
            node = child

        self._backup(path, value)

    def _backup(self, path: list[tuple[Node, int]], value: float) -> None:
        """``value`` is for the side to move at the deepest node of ``path``"""
        for depth in range(len(path) - 1, -1, -1):
            node, index = path[depth]
            node.child_visits[index] += 1
            node.child_value[index] += value
            node.visits += 1

            if self.cfg.proven_values and not node.proven.is_proven:
                node.proven = node.derive_proven()
                if node.proven.is_proven and depth > 0:
                    parent, parent_index = path[depth - 1]
                    parent.child_proven[parent_index] = node.proven
            value = -value


def _root_policy(root: Node) -> np.ndarray:
    visits = root.child_visits.astype(np.float64)
    if root.proven.is_proven:
        # keep only children that realise the proven outcome
        wanted = root.proven.flipped()
        keep = np.array([status is wanted for status in root.child_proven])
        if root.proven is ProvenStatus.LOSS or not keep.any():
            keep = np.ones(len(visits), dtype=bool)
        visits = np.where(keep, visits, 0.0)
        if visits.sum() == 0:
            visits = keep.astype(np.float64)
    if visits.sum() == 0:
        visits = np.ones(len(visits))
    return visits / visits.sum()


def search(
    state: GameState,
    evaluator: Evaluator,
    cfg: SearchConfig,
    rng: np.random.Generator,
    add_noise: bool = False,
    reuse: Optional[Node] = None,
    max_simulations: Optional[int] = None,
) -> SearchResult:
    """
    Run up to ``max_simulations`` simulations from ``state``.

    ``reuse`` is a subtree from a previous search and is only honoured when
    ``cfg.reuse_tree`` is set. The search stops early once the root is
    proven (with ``cfg.proven_values``).
    """
    run = _SearchRun(evaluator, cfg)
    budget = max_simulations if max_simulations is not None else cfg.max_simulations

    if cfg.reuse_tree and reuse is not None and reuse.state == state:
        root = reuse
        root_value = 0.0
    else:
        root, root_value = run.expand(state)

    if add_noise:
        root.priors = apply_dirichlet_noise(root.priors, cfg.dirichlet_epsilon, cfg.dirichlet_alpha, rng)

    simulations = 0
    if len(root.moves) > 1:
        while simulations < budget:
            if cfg.proven_values and root.proven.is_proven:
                break
            run.simulate(root)
            simulations += 1

    if cfg.proven_values and root.proven.is_proven:
        estimate = root.proven.score()
    elif root.child_visits.sum() > 0:
        estimate = float(root.child_value.sum() / root.child_visits.sum())
    else:
        estimate = float(root_value)

    logger.debug(
        f"Search at ply {state.ply}: {simulations} sims, {run.evaluations} evals, "
        f"root {root.proven.value}, value {estimate:+.3f}"
    )
    return SearchResult(
        moves=list(root.moves),
        visits=root.child_visits.copy(),
        policy=_root_policy(root),
        root_value=estimate,
        proven=root.proven,
        simulations=simulations,
        evaluations=run.evaluations,
        terminal_evaluations=run.terminal_evaluations,
        root=root,
    )


def subtree(result: SearchResult, move: int) -> Optional[Node]:
    """Child node reached by ``move``, for tree reuse"""
    if result.root is None or move not in result.moves:
        return None
    return result.root.children[result.moves.index(move)]


def select_move(
    policy: np.ndarray,
    temperature: float,
    turn: int,
    temperature_drop: float,
    rng: np.random.Generator,
    moves: Optional[list[int]] = None,
) -> int:
    """
    Pick a move from a visit distribution.

    From ``turn >= temperature_drop`` on the temperature is 0: argmax with a
    uniform tie-break. Otherwise sample proportionally to policy^(1/temperature).
    """
    policy = np.asarray(policy, dtype=np.float64)
    moves = list(range(len(policy))) if moves is None else moves

    if turn >= temperature_drop or temperature == 0:
        best = np.flatnonzero(policy == policy.max())
        index = int(best[0]) if len(best) == 1 else int(rng.choice(best))
        return moves[index]

    weights = np.power(policy / policy.max(), 1.0 / temperature)
    weights /= weights.sum()
    return moves[int(rng.choice(len(weights), p=weights))]
