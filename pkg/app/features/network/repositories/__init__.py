"""Network repositories"""
from .checkpoints import (
    CHECKPOINT_FORMAT_VERSION,
    CheckpointHeader,
    CheckpointRepository,
    load_checkpoint,
    save_checkpoint,
)

__all__ = [
    "CHECKPOINT_FORMAT_VERSION",
    "CheckpointHeader",
    "CheckpointRepository",
    "load_checkpoint",
    "save_checkpoint",
]
