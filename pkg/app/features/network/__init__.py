"""Policy/value network feature module"""

from app.features.network.accounting import forward_flops, param_count
from app.features.network.domain import (
    Architecture,
    LossComponents,
    NetworkOutput,
    NetworkParams,
    TrainingBatch,
    TrainingExample,
)
from app.features.network.mlp import forward, init_network, loss, loss_and_grad
from app.features.network.optimizer import AdamState, OptimizerConfig, train_step

__all__ = [
    "forward_flops",
    "param_count",
    "Architecture",
    "LossComponents",
    "NetworkOutput",
    "NetworkParams",
    "TrainingBatch",
    "TrainingExample",
    "forward",
    "init_network",
    "loss",
    "loss_and_grad",
    "AdamState",
    "OptimizerConfig",
    "train_step",
]
