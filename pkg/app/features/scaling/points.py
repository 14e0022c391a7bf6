"""Join ratings with checkpoint headers and compute ledgers"""
import logging
from pathlib import Path
from typing import Optional

from app.errors import InsufficientDataError, MissingInputError
from app.features.arena.domain import AgentKind
from app.features.arena.rating import RatingTable
from app.features.arena.schemas import AgentSpec, RatingEntry
from app.features.network.accounting import param_count
from app.features.network.repositories.checkpoints import load_checkpoint
from app.features.scaling.repositories import AgentPointRepository
from app.features.scaling.schemas import AgentPoint
from app.features.training.repositories import LedgerRepository

logger = logging.getLogger(__name__)


def build_agent_points(
    ratings: RatingTable | list[RatingEntry],
    benchmark_id: Optional[str] = None,
) -> list[AgentPoint]:
    """
    One point per rated network agent, with N from its architecture and C and
    the generated states from the ledger row of its run at the same step.

    ``benchmark_id`` names the optimal-play benchmark (``solver:0`` for
    Connect Four, the strongest agent with extra search otherwise); the
    solver gap of every point is its Elo distance below that agent.

    Raises:
        MissingInputError: the benchmark is not rated
        InsufficientDataError: no usable network agent
    """
    entries = ratings.rows() if isinstance(ratings, RatingTable) else list(ratings)
    by_id = {entry.agent_id: entry for entry in entries}
    benchmark_elo = None
    if benchmark_id is not None:
        if benchmark_id not in by_id:
            logger.error(f"Benchmark agent {benchmark_id} is not in the rating table")
            raise MissingInputError(f"Benchmark agent '{benchmark_id}' is not rated")
        benchmark_elo = by_id[benchmark_id].elo

    points = []
    for entry in entries:
        spec = AgentSpec.parse(entry.agent_id)
        if spec.kind is not AgentKind.NETWORK or entry.agent_id == benchmark_id:
            continue
        try:
            params, header = load_checkpoint(spec.checkpoint)
        except MissingInputError as e:
            logger.warning(f"Skipping {entry.agent_id}: {e.detail}")
            continue

        run_dir = Path(spec.checkpoint).parent.parent
        row = LedgerRepository(run_dir).find_by_step(header.step)
        if row is None or row.C <= 0:
            logger.warning(f"Skipping {entry.agent_id}: no ledger row with positive compute at step {header.step}")
            continue

        points.append(
            AgentPoint(
                agent_id=entry.agent_id,
                game=header.game,
                width=header.architecture.width,
                seed=header.seed,
                step=header.step,
                params=param_count(params.arch),
                compute=float(row.C),
                states=row.states,
                elo=entry.elo,
                solver_gap=None if benchmark_elo is None else benchmark_elo - entry.elo,
            )
        )

    if not points:
        raise InsufficientDataError("No rated network agent could be joined with its checkpoint and ledger")
    logger.info(f"Joined {len(points)} rated agents with their checkpoints and ledgers")
    return points


def load_agent_points(path: str | Path) -> list[AgentPoint]:
    """
    Raises:
        MissingInputError: the table does not exist
        InsufficientDataError: the table holds no valid rows
    """
    repository = AgentPointRepository(path)
    if not repository.exists():
        logger.error(f"Agent point table not found: {path}")
        raise MissingInputError(f"Agent point table not found: {path}")
    points = repository.find_all()
    if not points:
        raise InsufficientDataError(f"{path} holds no valid agent points")
    return points
