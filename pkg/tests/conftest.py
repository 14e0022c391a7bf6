from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from app.features.solver import negamax
from app.features.training.schemas import TrainRunConfig


def pytest_collection_modifyitems(config, items):
    if os.getenv("LAB_EXPENSIVE_TESTS") == "1":
        return
    skip = pytest.mark.skip(reason="long-running; set LAB_EXPENSIVE_TESTS=1 to run")
    for item in items:
        if "expensive" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(autouse=True)
def _isolated_solver(monkeypatch):
    # no on-disk cache and a small table, fresh per test
    monkeypatch.setattr(negamax, "SOLVER_CACHE_PATH", "")
    monkeypatch.setattr(negamax, "SOLVER_TT_LOG2", 16)
    negamax.reset_solver()
    yield
    negamax.reset_solver()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def fixtures_dir() -> Path:
    return Path(__file__).parent / "fixtures"


TINY_RUN = {
    "game": "connect_four",
    "width": 4,
    "seed": 0,
    "training_steps": 3,
    "max_simulations": 4,
    "batch_size": 16,
    "replay_buffer_size": 64,
    "replay_buffer_reuse": 4,
    "games_per_round": 2,
}


@pytest.fixture
def tiny_config():
    """Factory for training configs that finish in seconds"""

    def build(**overrides) -> TrainRunConfig:
        return TrainRunConfig.model_validate({**TINY_RUN, **overrides})

    return build
