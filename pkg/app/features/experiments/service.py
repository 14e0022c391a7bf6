"""Sweeps: a grid of training runs tracked by a manifest"""
import logging
from pathlib import Path

from app.config import RUNS_DIR, WORKERS
from app.errors import ConfigError, LabError
from app.features.experiments.domain import RunStatus
from app.features.experiments.repositories import ManifestRepository
from app.features.experiments.schemas import ExperimentManifest, ManifestRun, SweepConfig
from app.features.training.service import run_training

logger = logging.getLogger(__name__)


class SweepService:
    """Runs every (width, seed) of a sweep in turn; completed runs are skipped on rerun"""

    def __init__(self, cfg: SweepConfig, runs_dir: str | Path = RUNS_DIR, workers: int = WORKERS):
        self.cfg = cfg
        self.experiment_dir = Path(runs_dir) / cfg.experiment
        self.workers = workers
        self.manifests = ManifestRepository(self.experiment_dir)

    def _initial_manifest(self) -> ExperimentManifest:
        return ExperimentManifest(
            experiment=self.cfg.experiment,
            game=self.cfg.game,
            widths=self.cfg.widths,
            seeds=self.cfg.seeds,
            training_steps=self.cfg.training_steps,
            runs=[
                ManifestRun(width=width, seed=seed, run_dir=str(self.experiment_dir / f"w{width}_s{seed}"))
                for width in self.cfg.widths
                for seed in self.cfg.seeds
            ],
        )

    def load_or_create(self) -> ExperimentManifest:
        """
        Raises:
            ConfigError: an existing manifest describes a different grid
        """
        fresh = self._initial_manifest()
        existing = self.manifests.find()
        if existing is None:
            self.manifests.save(fresh)
            return fresh
        same_grid = (
            existing.game is fresh.game
            and existing.widths == fresh.widths
            and existing.seeds == fresh.seeds
            and existing.training_steps == fresh.training_steps
        )
        if not same_grid:
            logger.error(f"Manifest {self.manifests.path} belongs to a different sweep")
            raise ConfigError(f"{self.experiment_dir} already holds a different sweep")
        return existing

    def run(self) -> ExperimentManifest:
        """
        Train every run that is not completed yet. A failing run is marked
        ``failed`` and the sweep moves on.
        """
        manifest = self.load_or_create()
        for run in manifest.runs:
            if run.status is RunStatus.COMPLETED:
                continue
            run.status = RunStatus.RUNNING
            run.error = None
            self.manifests.save(manifest)
            logger.info(f"Sweep {manifest.experiment}: training width {run.width} seed {run.seed}")
            try:
                summary = run_training(self.cfg.run_config(run.width, run.seed), run.run_dir, self.workers)
            except LabError as e:
                logger.error(f"Run {run.run_dir} failed: {e.detail}")
                run.status = RunStatus.FAILED
                run.error = e.detail
            else:
                run.steps = summary.steps
                run.status = RunStatus.COMPLETED if summary.completed else RunStatus.FAILED
            self.manifests.save(manifest)

        done = len(manifest.with_status(RunStatus.COMPLETED))
        logger.info(f"Sweep {manifest.experiment}: {done}/{len(manifest.runs)} runs completed")
        return manifest


def run_sweep(cfg: SweepConfig, runs_dir: str | Path = RUNS_DIR, workers: int = WORKERS) -> ExperimentManifest:
    return SweepService(cfg, runs_dir, workers).run()
