"""Learner state persistence for resumable runs"""
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from app.features.network.domain import NetworkParams
from app.features.network.optimizer import AdamState
from app.features.training.replay_buffer import ReplayBuffer

logger = logging.getLogger(__name__)

STATE_ARRAYS = "learner_state.npz"
STATE_HEADER = "learner_state.json"


@dataclass
class LearnerState:
    """Everything besides the params needed to continue a run"""
    step: int
    pending: int
    states: int
    games: int
    evaluations: int
    rng_state: dict[str, Any]
    adam: AdamState
    buffer: ReplayBuffer


class LearnerStateRepository:
    """``learner_state.npz`` (buffer and optimizer moments) plus ``learner_state.json`` (counters)"""

    def __init__(self, run_dir: str | Path):
        self._dir = Path(run_dir)

    def exists(self) -> bool:
        return (self._dir / STATE_HEADER).is_file() and (self._dir / STATE_ARRAYS).is_file()

    def save(self, state: LearnerState) -> None:
        arrays = state.buffer.to_arrays()
        for name, tensor in state.adam.m.items():
            arrays[f"adam.m.{name}"] = tensor
        for name, tensor in state.adam.v.items():
            arrays[f"adam.v.{name}"] = tensor

        self._dir.mkdir(parents=True, exist_ok=True)
        tmp_arrays = self._dir / (STATE_ARRAYS + ".tmp")
        with tmp_arrays.open("wb") as f:
            np.savez(f, **arrays)
        os.replace(tmp_arrays, self._dir / STATE_ARRAYS)

        header = {
            "step": state.step,
            "pending": state.pending,
            "states": state.states,
            "games": state.games,
            "evaluations": state.evaluations,
            "adam_step": state.adam.step,
            "buffer_capacity": state.buffer.capacity,
            "rng_state": state.rng_state,
        }
        tmp_header = self._dir / (STATE_HEADER + ".tmp")
        tmp_header.write_text(json.dumps(header, sort_keys=True))
        # the header is the commit point
        os.replace(tmp_header, self._dir / STATE_HEADER)
        logger.debug(f"Saved learner state at step {state.step} in {self._dir}")

    def load(self, params: NetworkParams) -> Optional[LearnerState]:
        if not self.exists():
            return None
        header = json.loads((self._dir / STATE_HEADER).read_text())
        with np.load(self._dir / STATE_ARRAYS, allow_pickle=False) as data:
            arrays = {name: data[name] for name in data.files}

        adam = AdamState(
            m={name: arrays[f"adam.m.{name}"] for name in params.tensors},
            v={name: arrays[f"adam.v.{name}"] for name in params.tensors},
            step=header["adam_step"],
        )
        buffer = ReplayBuffer.from_arrays(header["buffer_capacity"], arrays)
        return LearnerState(
            step=header["step"],
            pending=header["pending"],
            states=header["states"],
            games=header["games"],
            evaluations=header["evaluations"],
            rng_state=header["rng_state"],
            adam=adam,
            buffer=buffer,
        )
