"""Checkpoint repository: versioned ``.npz`` containers with a JSON header"""
import json
import logging
import re
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from app.errors import MissingInputError
from app.features.games.domain import GameId
from app.features.network.domain import Architecture, NetworkParams

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION = 1

_HEADER_KEY = "__header__"
_STEP_PATTERN = re.compile(r"^step_(\d{8})\.npz$")


class CheckpointHeader(BaseModel):
    """Self-description stored next to the raw tensors"""
    format_version: int = CHECKPOINT_FORMAT_VERSION
    game: GameId
    architecture: Architecture
    seed: int
    step: int = Field(..., ge=0)
    parent: Optional[str] = None
    diverged: bool = False


def save_checkpoint(path: str | Path, params: NetworkParams, header: CheckpointHeader) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = dict(params.tensors)
    arrays[_HEADER_KEY] = np.array(header.model_dump_json())
    with path.open("wb") as f:
        np.savez(f, **arrays)
    logger.debug(f"Wrote checkpoint {path} (step {header.step})")
    return path


def load_checkpoint(path: str | Path) -> tuple[NetworkParams, CheckpointHeader]:
    """
    Raises:
        MissingInputError: file missing, unreadable, wrong version or wrong shapes
    """
    path = Path(path)
    if not path.is_file():
        logger.error(f"Checkpoint not found: {path}")
        raise MissingInputError(f"Checkpoint not found: {path}")

    with np.load(path, allow_pickle=False) as data:
        if _HEADER_KEY not in data:
            raise MissingInputError(f"{path} is not a checkpoint (no header)")
        header = CheckpointHeader.model_validate(json.loads(str(data[_HEADER_KEY])))
        tensors = {name: data[name] for name in data.files if name != _HEADER_KEY}

    if header.format_version != CHECKPOINT_FORMAT_VERSION:
        logger.error(f"Unsupported checkpoint version {header.format_version} in {path}")
        raise MissingInputError(
            f"Checkpoint {path} has format version {header.format_version}, "
            f"expected {CHECKPOINT_FORMAT_VERSION}"
        )

    for name, fan_in, fan_out in header.architecture.layers():
        weight = tensors.get(f"{name}.weight")
        bias = tensors.get(f"{name}.bias")
        if weight is None or bias is None or weight.shape != (fan_in, fan_out) or bias.shape != (fan_out,):
            logger.error(f"Checkpoint {path} has a missing or misshapen layer '{name}'")
            raise MissingInputError(f"Checkpoint {path}: layer '{name}' does not match its architecture")

    return NetworkParams(header.architecture, tensors), header


class CheckpointRepository:
    """Checkpoints of one training run, ``<run>/checkpoints/step_<8 digits>.npz``"""

    def __init__(self, run_dir: str | Path):
        self._dir = Path(run_dir) / "checkpoints"

    @property
    def directory(self) -> Path:
        return self._dir

    def path_for(self, step: int, diverged: bool = False) -> Path:
        suffix = "_diverged" if diverged else ""
        return self._dir / f"step_{step:08d}{suffix}.npz"

    def steps(self) -> List[int]:
        """Steps with a regular (non-diverged) checkpoint, ascending"""
        if not self._dir.is_dir():
            return []
        found = []
        for path in self._dir.iterdir():
            match = _STEP_PATTERN.match(path.name)
            if match:
                found.append(int(match[1]))
        return sorted(found)

    def find_latest(self) -> Optional[Path]:
        steps = self.steps()
        return self.path_for(steps[-1]) if steps else None

    def save(self, params: NetworkParams, header: CheckpointHeader) -> Path:
        return save_checkpoint(self.path_for(header.step, header.diverged), params, header)

    def load(self, step: int) -> tuple[NetworkParams, CheckpointHeader]:
        return load_checkpoint(self.path_for(step))
