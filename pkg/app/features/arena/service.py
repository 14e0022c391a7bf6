"""Tournaments: scheduling, parallel play, resumable match logs"""
import logging
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from app.config import WORKERS
from app.errors import ConfigError, LabRuntimeError, MissingInputError
from app.features.arena.agents import agent_forward_flops, load_agent
from app.features.arena.domain import AgentKind, Schedule
from app.features.arena.matches import (
    game_seed,
    inference_constrained_match,
    play_match,
    random_opening,
    simulations_for_budget,
)
from app.features.arena.repositories import MatchLogRepository
from app.features.arena.schedules import build_pairs, round_robin_pairs
from app.features.arena.schemas import AgentSpec, MatchConfig, MatchRecord

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchTask:
    a: AgentSpec
    b: AgentSpec
    cfg: MatchConfig
    game_index: int
    opening: tuple[int, ...] = ()
    budget: Optional[int] = None

    @property
    def key(self) -> tuple[str, str, int, Optional[int]]:
        return self.a.id, self.b.id, self.game_index, self.budget


@dataclass
class TournamentSummary:
    log_path: Path
    played: int
    skipped: int
    resumed: int


def play_task(task: MatchTask) -> MatchRecord:
    """Worker entry point; agents are rebuilt in the worker (checkpoints are cached per process)"""
    agent_a = load_agent(task.a, task.cfg)
    agent_b = load_agent(task.b, task.cfg)
    if task.budget is not None:
        return inference_constrained_match(agent_a, agent_b, task.budget, task.cfg, task.game_index)
    return play_match(agent_a, agent_b, task.cfg, task.game_index, list(task.opening))


def _skipped_record(task: MatchTask) -> MatchRecord:
    return MatchRecord(
        a=task.a.id,
        b=task.b.id,
        score_a=0.5,
        seed=game_seed(task.cfg, task.a.id, task.b.id, task.game_index, task.budget),
        transcript="",
        game_index=task.game_index,
        first="a" if task.game_index % 2 == 0 else "b",
        skipped=True,
        budget=task.budget,
    )


def _playable(specs: list[AgentSpec], cfg: MatchConfig) -> set[str]:
    """
    Ids of agents that can be loaded; missing checkpoints are reported and left out.

    Raises:
        UnsupportedGameError: an agent cannot play ``cfg.game`` at all
    """
    playable = set()
    for spec in specs:
        try:
            load_agent(spec, cfg)
        except MissingInputError as e:
            logger.warning(f"Skipping agent {spec.id}: {e.detail}")
            continue
        playable.add(spec.id)
    return playable


def parse_pool(agents: Iterable[str]) -> list[AgentSpec]:
    """
    Raises:
        ConfigError: malformed or duplicate agent ids
    """
    specs = [AgentSpec.parse(agent) for agent in agents]
    ids = [spec.id for spec in specs]
    if len(set(ids)) != len(ids):
        raise ConfigError(f"Duplicate agents in pool: {sorted({i for i in ids if ids.count(i) > 1})}", field="agent")
    if len(specs) < 2:
        raise ConfigError("A tournament needs at least two agents", field="agent")
    return specs


def _run_tasks(tasks: list[MatchTask], playable: set[str], log: MatchLogRepository, workers: int) -> TournamentSummary:
    done = log.existing_keys()
    pending = [task for task in tasks if task.key not in done]
    resumed = len(tasks) - len(pending)
    if resumed:
        logger.info(f"Resuming {log.path}: {resumed} of {len(tasks)} games already logged")

    skipped = [task for task in pending if task.a.id not in playable or task.b.id not in playable]
    to_play = [task for task in pending if task.a.id in playable and task.b.id in playable]
    if skipped:
        log.create_many([_skipped_record(task) for task in skipped])

    played = 0
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 and len(to_play) > 1 else None
    try:
        results = pool.map(play_task, to_play, chunksize=max(1, len(to_play) // (8 * workers))) if pool else map(
            play_task, to_play
        )
        for record in results:
            log.create(record)
            played += 1
            if played % 100 == 0:
                logger.info(f"{log.path.name}: {played}/{len(to_play)} games played")
    except BrokenProcessPool as e:
        logger.error(f"Match worker died after {played} games; logged games are kept for resuming")
        raise LabRuntimeError(f"A match worker process died while playing {log.path.name}") from e
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)

    logger.info(f"{log.path.name}: {played} games played, {len(skipped)} skipped, {resumed} already logged")
    return TournamentSummary(log_path=log.path, played=played, skipped=len(skipped), resumed=resumed)


def run_tournament(
    pool: Iterable[str],
    schedule: Schedule,
    cfg: MatchConfig,
    log_path: str | Path,
    workers: int = WORKERS,
) -> TournamentSummary:
    """
    Play ``cfg.games_per_pair`` games for every scheduled pairing, appending
    to the JSON lines log at ``log_path``. Games already in the log are not
    replayed, so an interrupted tournament resumes where it stopped.

    Raises:
        ConfigError: malformed pool
        UnsupportedGameError: an agent cannot play ``cfg.game``
    """
    specs = parse_pool(pool)
    by_id = {spec.id: spec for spec in specs}
    playable = _playable(specs, cfg)

    rng = np.random.default_rng([cfg.seed, 2])
    pairs = build_pairs([spec.id for spec in specs], schedule, cfg.sparse_degree, rng)
    if cfg.games_per_pair % 2:
        logger.warning(f"{cfg.games_per_pair} games per pair cannot be color balanced")

    tasks = [
        MatchTask(
            a=by_id[a],
            b=by_id[b],
            cfg=cfg,
            game_index=game_index,
            opening=tuple(random_opening(cfg, a, b, game_index)),
        )
        for a, b in pairs
        for game_index in range(cfg.games_per_pair)
    ]
    logger.info(
        f"Tournament {schedule.value} on {cfg.game.value}: {len(specs)} agents, {len(pairs)} pairs, {len(tasks)} games"
    )
    return _run_tasks(tasks, playable, MatchLogRepository(log_path), max(1, workers))


def run_inference_tournament(
    pool: Iterable[str],
    budgets: Iterable[int],
    cfg: MatchConfig,
    log_path: str | Path,
    workers: int = WORKERS,
) -> TournamentSummary:
    """
    Round robin among network agents at each per-move FLOP budget, with every
    agent's simulations scaled inversely to its forward-pass cost.

    Raises:
        ConfigError: malformed pool, non-network agents, or non-positive budgets
    """
    specs = parse_pool(pool)
    others = [spec.id for spec in specs if spec.kind is not AgentKind.NETWORK]
    if others:
        raise ConfigError(f"Inference tournaments only take network agents, got {others}", field="agent")
    budgets = sorted(set(budgets))
    if not budgets or budgets[0] <= 0:
        raise ConfigError("FLOP budgets must be positive", field="budget")

    by_id = {spec.id: spec for spec in specs}
    playable = _playable(specs, cfg)
    for budget in budgets:
        for spec in specs:
            if spec.id in playable:
                sims = simulations_for_budget(budget, agent_forward_flops(spec))
                logger.debug(f"Budget {budget}: {spec.id} gets {sims} simulations")

    tasks = [
        MatchTask(a=by_id[a], b=by_id[b], cfg=cfg, game_index=game_index, budget=budget)
        for budget in budgets
        for a, b in round_robin_pairs([spec.id for spec in specs])
        for game_index in range(cfg.games_per_pair)
    ]
    logger.info(f"Inference tournament: {len(specs)} agents, {len(budgets)} budgets, {len(tasks)} games")
    return _run_tasks(tasks, playable, MatchLogRepository(log_path), max(1, workers))


def load_matches(log_path: str | Path) -> list[MatchRecord]:
    """
    Raises:
        MissingInputError: the log does not exist
    """
    log = MatchLogRepository(log_path)
    if not log.exists():
        logger.error(f"Match log not found: {log_path}")
        raise MissingInputError(f"Match log not found: {log_path}")
    return log.find_all()
