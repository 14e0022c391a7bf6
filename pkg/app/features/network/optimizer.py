"""Adaptive-moment optimizer over NetworkParams"""
import logging
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, Field

from app.errors import TrainingDivergedError
from app.features.network.domain import LossComponents, NetworkParams, TrainingBatch
from app.features.network.mlp import loss_and_grad

logger = logging.getLogger(__name__)


class OptimizerConfig(BaseModel):
    learning_rate: float = Field(1e-3, gt=0)
    weight_decay: float = Field(1e-4, ge=0)  # c_reg of the L2 term, part of the loss
    beta1: float = Field(0.9, ge=0, lt=1)
    beta2: float = Field(0.999, ge=0, lt=1)
    epsilon: float = Field(1e-8, gt=0)


@dataclass(frozen=True)
class AdamState:
    """First and second moment estimates plus the number of steps taken"""
    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]
    step: int = 0

    @classmethod
    def zeros_like(cls, params: NetworkParams) -> "AdamState":
        return cls(
            m={name: np.zeros_like(t) for name, t in params.tensors.items()},
            v={name: np.zeros_like(t) for name, t in params.tensors.items()},
            step=0,
        )


def train_step(
    params: NetworkParams,
    batch: TrainingBatch,
    state: AdamState,
    cfg: OptimizerConfig,
) -> tuple[NetworkParams, AdamState, LossComponents]:
    """
    One Adam step on the full objective. Inputs are left untouched.

    Raises:
        TrainingDivergedError: non-finite loss or gradient
    """
    components, grads = loss_and_grad(params, batch, cfg.weight_decay)

    if not np.isfinite(components.total) or not all(np.isfinite(g).all() for g in grads.values()):
        logger.error(f"Non-finite loss or gradient at optimizer step {state.step + 1}: {components}")
        raise TrainingDivergedError(
            f"Training diverged at optimizer step {state.step + 1} (loss={components.total})"
        )

    step = state.step + 1
    b1, b2 = cfg.beta1, cfg.beta2
    correction1 = 1.0 - b1 ** step
    correction2 = 1.0 - b2 ** step

    tensors, m_new, v_new = {}, {}, {}
    for name, value in params.tensors.items():
        grad = grads[name]
        m = b1 * state.m[name] + (1.0 - b1) * grad
        v = b2 * state.v[name] + (1.0 - b2) * grad * grad
        update = cfg.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + cfg.epsilon)
        tensors[name] = (value - update).astype(value.dtype)
        m_new[name] = m.astype(value.dtype)
        v_new[name] = v.astype(value.dtype)

    return params.replace(tensors), AdamState(m_new, v_new, step), components
