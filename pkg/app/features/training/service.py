"""Self-play training loop with compute ledger and resumable run directories"""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from app.config import WORKERS
from app.errors import ConfigError, LabRuntimeError, TrainingDivergedError
from app.features.network.accounting import forward_flops
from app.features.network.domain import NetworkParams
from app.features.network.mlp import init_network
from app.features.network.optimizer import AdamState, train_step
from app.features.network.repositories.checkpoints import CheckpointHeader, CheckpointRepository
from app.features.training.ledger import ledger_entry, optimization_cadence
from app.features.training.replay_buffer import ReplayBuffer
from app.features.training.repositories import (
    LearnerState,
    LearnerStateRepository,
    LedgerRepository,
    SelfPlayStatsRepository,
)
from app.features.training.schemas import RunSummary, SelfPlayRecord, TrainRunConfig
from app.features.training.self_play import SelfPlayGame, play_game_task

logger = logging.getLogger(__name__)

CONFIG_SNAPSHOT = "config.json"


class TrainingService:
    """
    One learner owning the buffer and params; self-play games are generated in
    rounds of ``games_per_round`` that all use the params current at the start
    of the round. Results are independent of the worker count.
    """

    def __init__(self, cfg: TrainRunConfig, run_dir: str | Path, workers: int = WORKERS):
        self.cfg = cfg
        self.run_dir = Path(run_dir)
        self.workers = max(1, workers)
        self.checkpoints = CheckpointRepository(self.run_dir)
        self.ledger = LedgerRepository(self.run_dir)
        self.selfplay = SelfPlayStatsRepository(self.run_dir)
        self.learner_states = LearnerStateRepository(self.run_dir)

        self.flops = forward_flops(cfg.architecture())
        self.data_per_step = cfg.data_per_step
        self.schedule = set(cfg.schedule())
        self.search_cfg = cfg.search_config()
        self.optimizer_cfg = cfg.optimizer_config()

        self._unflushed: list[SelfPlayRecord] = []
        self._last_checkpoint: Optional[str] = None

    # ============================================================================
    # RUN DIRECTORY
    # ============================================================================

    def _snapshot_config(self) -> None:
        """
        Write ``config.json`` or check it matches the existing one.

        Raises:
            ConfigError: the run directory belongs to a different config
        """
        path = self.run_dir / CONFIG_SNAPSHOT
        current = json.loads(self.cfg.model_dump_json())
        if path.is_file():
            stored = json.loads(path.read_text())
            if stored != current:
                logger.error(f"Run directory {self.run_dir} was created with a different config")
                raise ConfigError(f"{self.run_dir} already holds a run with a different config")
            return
        self.run_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(current, indent=2, sort_keys=True))

    def _restore(self) -> tuple[NetworkParams, LearnerState]:
        steps = self.checkpoints.steps()
        if steps:
            params, header = self.checkpoints.load(steps[-1])
            state = self.learner_states.load(params)
            if state is not None and state.step == header.step:
                logger.info(f"Resuming {self.run_dir} from step {state.step} ({state.games} games)")
                self._last_checkpoint = self.checkpoints.path_for(header.step).name
                return params, state
            logger.warning(f"Learner state of {self.run_dir} does not match step {steps[-1]}; starting over")

        params = init_network(self.cfg.architecture(), self.cfg.seed)
        rng = np.random.default_rng([self.cfg.seed, 1])
        return params, LearnerState(
            step=0,
            pending=0,
            states=0,
            games=0,
            evaluations=0,
            rng_state=rng.bit_generator.state,
            adam=AdamState.zeros_like(params),
            buffer=ReplayBuffer(self.cfg.replay_buffer_size),
        )

    # ============================================================================
    # SELF-PLAY
    # ============================================================================

    def _play_round(self, params: NetworkParams, first_game: int, pool) -> Iterable[SelfPlayGame]:
        tasks = [
            (self.cfg.game, params, self.search_cfg, self.cfg.seed, first_game + offset)
            for offset in range(self.cfg.games_per_round)
        ]
        if pool is None:
            return map(play_game_task, tasks)
        return pool.map(play_game_task, tasks)

    def _absorb(self, state: LearnerState, game: SelfPlayGame) -> None:
        for example in game.examples:
            example.tag = state.states
            state.buffer.add(example)
            state.states += 1
        state.pending += len(game.examples)
        state.evaluations += game.evaluations
        self._unflushed.append(
            SelfPlayRecord(
                game_index=state.games,
                length=game.length,
                outcome=game.outcome.value,
                first_player_score=game.first_player_score,
            )
        )
        state.games += 1

    # ============================================================================
    # OPTIMIZATION
    # ============================================================================

    def _optimize(self, params: NetworkParams, state: LearnerState, rng: np.random.Generator) -> NetworkParams:
        """Run every optimization step that is due, checkpointing on schedule"""
        while (
            state.step < self.cfg.training_steps
            and len(state.buffer) >= self.cfg.batch_size
            and optimization_cadence(state.pending, self.data_per_step) > 0
        ):
            batch = state.buffer.sample(self.cfg.batch_size, rng)
            try:
                params, state.adam, components = train_step(params, batch, state.adam, self.optimizer_cfg)
            except TrainingDivergedError:
                self._save_checkpoint(params, state, diverged=True)
                raise
            state.step += 1
            state.pending -= self.data_per_step

            if state.step in self.schedule:
                logger.info(
                    f"{self.run_dir.name} step {state.step}: loss {components.total:.4f} "
                    f"(value {components.value:.4f}, policy {components.policy:.4f}), "
                    f"{state.games} games, {state.states} states"
                )
                state.rng_state = rng.bit_generator.state
                self._save_checkpoint(params, state)
        return params

    def _save_checkpoint(self, params: NetworkParams, state: LearnerState, diverged: bool = False) -> None:
        header = CheckpointHeader(
            game=self.cfg.game,
            architecture=self.cfg.architecture(),
            seed=self.cfg.seed,
            step=state.step,
            parent=self._last_checkpoint,
            diverged=diverged,
        )
        path = self.checkpoints.save(params, header)
        if diverged:
            logger.error(f"Training diverged at step {state.step}; wrote {path}")
            return

        self.selfplay.append_new(self._unflushed)
        self._unflushed = []
        self.ledger.append(
            ledger_entry(
                step=state.step,
                simulations=self.cfg.max_simulations,
                forward_flops=self.flops,
                data_per_step=self.data_per_step,
                states=state.states,
                games=state.games,
                evaluations=state.evaluations,
            )
        )
        self.learner_states.save(state)
        self._last_checkpoint = path.name

    # ============================================================================
    # PUBLIC API
    # ============================================================================

    def run(self) -> RunSummary:
        """
        Train until ``training_steps`` optimization steps are done.

        Raises:
            ConfigError: run directory holds a different config
            TrainingDivergedError: non-finite loss (a diverged checkpoint is written first)
        """
        self._snapshot_config()
        params, state = self._restore()

        if state.step >= self.cfg.training_steps:
            logger.info(f"{self.run_dir} already completed {state.step} steps; nothing to do")
            return self._summary(state)

        rng = np.random.default_rng()
        rng.bit_generator.state = state.rng_state
        logger.info(
            f"Training {self.cfg.game.value} width {self.cfg.width} seed {self.cfg.seed}: "
            f"S={self.cfg.training_steps}, D={self.data_per_step}, F={self.flops}, workers={self.workers}"
        )

        pool = ProcessPoolExecutor(max_workers=self.workers) if self.workers > 1 else None
        try:
            while state.step < self.cfg.training_steps:
                for game in self._play_round(params, state.games, pool):
                    self._absorb(state, game)
                    params = self._optimize(params, state, rng)
                    if state.step >= self.cfg.training_steps:
                        # games left in the round are dropped
                        break
        except BrokenProcessPool as e:
            logger.error(f"Self-play worker died at step {state.step}")
            raise LabRuntimeError(f"A self-play worker process died in {self.run_dir}; rerun to resume") from e
        finally:
            if pool is not None:
                pool.shutdown(cancel_futures=True)

        return self._summary(state)

    def _summary(self, state: LearnerState) -> RunSummary:
        return RunSummary(
            run_dir=str(self.run_dir),
            steps=state.step,
            games=state.games,
            states=state.states,
            checkpoints=self.checkpoints.steps(),
            completed=state.step >= self.cfg.training_steps,
        )


def run_training(cfg: TrainRunConfig, run_dir: str | Path, workers: int = WORKERS) -> RunSummary:
    return TrainingService(cfg, run_dir, workers).run()
