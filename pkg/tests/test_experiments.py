from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from app.config import WORKERS, load_key_value_config
from app.errors import ConfigError, TrainingDivergedError
from app.features.arena import MatchConfig, Schedule, fit_ratings, load_matches, run_tournament
from app.features.experiments import RunStatus, SweepConfig, run_sweep
from app.features.experiments import service as sweep_service
from app.features.experiments.repositories import ManifestRepository
from app.features.experiments.service import SweepService
from app.features.games.domain import GameId
from app.features.network.repositories import CheckpointRepository
from app.features.scaling import build_agent_points, exponent_convergence, fit_size_scaling
from app.features.training.repositories import LedgerRepository

GRID = {
    "game": "connect_four",
    "max_simulations": 4,
    "batch_size": 16,
    "replay_buffer_size": 64,
    "replay_buffer_reuse": 4,
    "games_per_round": 2,
}


def _sweep(**overrides) -> SweepConfig:
    data = {**GRID, "experiment": "tiny", "widths": "4,5", "seeds": "0;1", "training_steps": 2}
    data.update(overrides)
    return SweepConfig.model_validate(data)


# ============================================================================
# Sweep config
# ============================================================================


def test_grid_lists_parse_from_text() -> None:
    cfg = _sweep()
    assert cfg.widths == [4, 5]
    assert cfg.seeds == [0, 1]

    run = cfg.run_config(5, 1)
    assert (run.width, run.seed, run.training_steps) == (5, 1, 2)
    assert run.max_simulations == cfg.max_simulations


def test_grid_rejects_repeats_and_bad_names() -> None:
    with pytest.raises(ValidationError):
        _sweep(widths="4,4")
    with pytest.raises(ValidationError):
        _sweep(widths="0,4")
    with pytest.raises(ValidationError):
        _sweep(experiment="no spaces")


def test_sweep_config_file(tmp_path) -> None:
    path = tmp_path / "sweep.cfg"
    path.write_text("experiment = c4-widths\ngame = connect_four\nwidths = 4, 8, 16\nseeds = 0,1\ntraining_steps = 10\n")
    cfg = load_key_value_config(path, SweepConfig)
    assert cfg.experiment == "c4-widths"
    assert cfg.widths == [4, 8, 16]
    assert cfg.game is GameId.CONNECT_FOUR


# ============================================================================
# Sweeps
# ============================================================================


def test_sweep_trains_every_run(tmp_path) -> None:
    manifest = run_sweep(_sweep(), tmp_path, workers=1)
    assert len(manifest.runs) == 4
    assert all(run.status is RunStatus.COMPLETED for run in manifest.runs)
    assert all(run.steps == 2 for run in manifest.runs)

    stored = ManifestRepository(tmp_path / "tiny").find()
    assert stored == manifest
    for run in manifest.runs:
        assert [row.step for row in LedgerRepository(run.run_dir).find_all()] == [1, 2]
    assert len(manifest.checkpoint_dirs()) == 4


def test_failed_runs_are_recorded_and_retried(tmp_path, monkeypatch) -> None:
    original = sweep_service.run_training

    def diverge_on_width_five(cfg, run_dir, workers):
        if cfg.width == 5:
            raise TrainingDivergedError("non-finite loss at step 1")
        return original(cfg, run_dir, workers)

    monkeypatch.setattr(sweep_service, "run_training", diverge_on_width_five)
    manifest = run_sweep(_sweep(seeds="0"), tmp_path, workers=1)
    failed = manifest.with_status(RunStatus.FAILED)
    assert [run.width for run in failed] == [5]
    assert failed[0].error == "non-finite loss at step 1"
    assert manifest.find(4, 0).status is RunStatus.COMPLETED

    monkeypatch.setattr(sweep_service, "run_training", original)
    rerun = run_sweep(_sweep(seeds="0"), tmp_path, workers=1)
    assert all(run.status is RunStatus.COMPLETED for run in rerun.runs)
    assert rerun.find(5, 0).error is None


def test_a_different_grid_is_refused(tmp_path) -> None:
    SweepService(_sweep(), tmp_path, workers=1).load_or_create()
    with pytest.raises(ConfigError):
        SweepService(_sweep(widths="4,6"), tmp_path, workers=1).load_or_create()


def test_unreadable_manifest(tmp_path) -> None:
    (tmp_path / "tiny").mkdir()
    (tmp_path / "tiny" / "manifest.json").write_text("{not json")
    with pytest.raises(ConfigError):
        SweepService(_sweep(), tmp_path, workers=1).run()


# ============================================================================
# Desk-scale size trend
# ============================================================================


@pytest.mark.expensive
def test_desk_scale_elo_grows_with_width(tmp_path) -> None:
    cfg = SweepConfig.model_validate(
        {
            "experiment": "c4-desk",
            "game": "connect_four",
            "widths": "4,8,16,32",
            "seeds": "0,1",
            "training_steps": 2000,
            "checkpoint_steps": "500,1000,2000",
        }
    )
    manifest = run_sweep(cfg, tmp_path, workers=WORKERS)
    assert all(run.status is RunStatus.COMPLETED for run in manifest.runs)

    checkpoints = [CheckpointRepository(run.run_dir) for run in manifest.runs]
    pool = ["random"] + [f"net:{repo.path_for(step)}" for repo in checkpoints for step in (500, 1000, 2000)]
    match_cfg = MatchConfig(games_per_pair=20, sparse_degree=8, seed=0)
    summary = run_tournament(pool, Schedule.SPARSE, match_cfg, tmp_path / "matches.jsonl", WORKERS)
    points = build_agent_points(fit_ratings(load_matches(summary.log_path)))

    final = [p for p in points if p.step == 2000]
    assert len(final) == 8
    mean_elo = [np.mean([p.elo for p in final if p.width == width]) for width in cfg.widths]
    assert all(later > earlier for earlier, later in zip(mean_elo, mean_elo[1:]))

    fit = fit_size_scaling(final)
    assert fit.exponent > 0
    assert fit.pearson_r >= 0.9

    series = exponent_convergence(points)
    assert [row.step for row in series.rows] == [500, 1000, 2000]
    assert all(row.exponent > 0 for row in series.rows)
    assert series.non_decreasing
