"""Domain types for the policy/value MLP"""

from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.features.games.domain import ACTION_COUNT, OBSERVATION_SIZE, GameId

# log-probabilities are clamped here so the cross-entropy stays finite
LOG_EPSILON = float(np.log(1e-12))


class Architecture(BaseModel):
    """Two-layer torso plus one hidden layer per head, all of width ``width``"""
    model_config = ConfigDict(frozen=True)

    input_size: int = Field(..., ge=1)
    width: int = Field(..., ge=1)
    action_count: int = Field(..., ge=1)

    @classmethod
    def for_game(cls, game: GameId, width: int) -> "Architecture":
        return cls(input_size=OBSERVATION_SIZE[game], width=width, action_count=ACTION_COUNT[game])

    def layers(self) -> list[tuple[str, int, int]]:
        """(name, fan_in, fan_out) in forward order"""
        d, w, a = self.input_size, self.width, self.action_count
        return [
            ("torso_1", d, w),
            ("torso_2", w, w),
            ("policy_hidden", w, w),
            ("policy_out", w, a),
            ("value_hidden", w, w),
            ("value_out", w, 1),
        ]


@dataclass(frozen=True)
class NetworkParams:
    """
    All weights and biases, keyed ``<layer>.weight`` (fan_in x fan_out) and
    ``<layer>.bias``. Tensors are read-only; updates produce new params.
    """
    arch: Architecture
    tensors: dict[str, np.ndarray]

    def __post_init__(self):
        for tensor in self.tensors.values():
            tensor.flags.writeable = False

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    @property
    def dtype(self) -> np.dtype:
        return self.tensors["torso_1.weight"].dtype

    def weight_names(self) -> list[str]:
        return [f"{name}.weight" for name, _, _ in self.arch.layers()]

    def replace(self, tensors: dict[str, np.ndarray]) -> "NetworkParams":
        return NetworkParams(self.arch, tensors)


@dataclass(frozen=True)
class NetworkOutput:
    """Raw policy logits, legal-masked prior and value in [-1, 1]"""
    logits: np.ndarray
    prior: np.ndarray
    value: np.ndarray | float


@dataclass
class TrainingExample:
    """One self-play position with its search policy and final outcome for the mover"""
    observation: np.ndarray
    legal_mask: np.ndarray
    policy: np.ndarray
    z: float
    # provenance tag (global state index), used to check buffer eviction
    tag: int = -1


@dataclass
class TrainingBatch:
    """Stacked examples: observations (B, d), masks and policies (B, A), outcomes (B,)"""
    observations: np.ndarray
    legal_masks: np.ndarray
    policies: np.ndarray
    outcomes: np.ndarray
    tags: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.outcomes)

    @classmethod
    def from_examples(cls, examples: list[TrainingExample], dtype=np.float32) -> "TrainingBatch":
        return cls(
            observations=np.stack([e.observation for e in examples]).astype(dtype),
            legal_masks=np.stack([e.legal_mask for e in examples]).astype(bool),
            policies=np.stack([e.policy for e in examples]).astype(dtype),
            outcomes=np.array([e.z for e in examples], dtype=dtype),
            tags=np.array([e.tag for e in examples], dtype=np.int64),
        )


@dataclass(frozen=True)
class LossComponents:
    total: float
    value: float
    policy: float
    reg: float
