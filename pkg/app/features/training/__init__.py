"""Self-play training feature module"""

from app.features.training.ledger import ledger_entry, optimization_cadence, training_compute
from app.features.training.replay_buffer import ReplayBuffer
from app.features.training.schemas import (
    LedgerEntry,
    RunSummary,
    SelfPlayRecord,
    TrainRunConfig,
    default_checkpoint_steps,
)
from app.features.training.self_play import SelfPlayGame, self_play_game
from app.features.training.service import TrainingService, run_training

__all__ = [
    "ledger_entry",
    "optimization_cadence",
    "training_compute",
    "ReplayBuffer",
    "LedgerEntry",
    "RunSummary",
    "SelfPlayRecord",
    "TrainRunConfig",
    "default_checkpoint_steps",
    "SelfPlayGame",
    "self_play_game",
    "TrainingService",
    "run_training",
]
