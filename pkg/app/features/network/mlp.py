"""
From-scratch policy/value MLP.

Hidden layers use ReLU, the value head ends in tanh and the policy head is a
softmax restricted to legal moves. The loss is the usual self-play objective:
squared value error, policy cross-entropy against the search distribution and
an L2 penalty on weights (biases excluded).
"""
import logging

import numpy as np

from app.errors import InsufficientDataError
from app.features.network.domain import (
    LOG_EPSILON,
    Architecture,
    LossComponents,
    NetworkOutput,
    NetworkParams,
    TrainingBatch,
)

logger = logging.getLogger(__name__)


def init_network(arch: Architecture, seed: int, dtype=np.float32) -> NetworkParams:
    """He-initialised weights N(0, 2/fan_in), zero biases; deterministic in ``seed``"""
    rng = np.random.default_rng(seed)
    tensors: dict[str, np.ndarray] = {}
    for name, fan_in, fan_out in arch.layers():
        scale = np.sqrt(2.0 / fan_in)
        tensors[f"{name}.weight"] = (rng.standard_normal((fan_in, fan_out)) * scale).astype(dtype)
        tensors[f"{name}.bias"] = np.zeros(fan_out, dtype=dtype)
    return NetworkParams(arch, tensors)


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def _dense(params: NetworkParams, name: str, x: np.ndarray) -> np.ndarray:
    return x @ params[f"{name}.weight"] + params[f"{name}.bias"]


def _activations(params: NetworkParams, obs: np.ndarray) -> dict[str, np.ndarray]:
    """Forward pass keeping every intermediate needed by backprop"""
    x = obs.astype(params.dtype, copy=False)
    h1 = _relu(_dense(params, "torso_1", x))
    h2 = _relu(_dense(params, "torso_2", h1))
    ph = _relu(_dense(params, "policy_hidden", h2))
    logits = _dense(params, "policy_out", ph)
    vh = _relu(_dense(params, "value_hidden", h2))
    value = np.tanh(_dense(params, "value_out", vh)[:, 0])
    return {"x": x, "h1": h1, "h2": h2, "ph": ph, "logits": logits, "vh": vh, "value": value}


def masked_log_softmax(logits: np.ndarray, legal_mask: np.ndarray) -> np.ndarray:
    """Log-probabilities over legal moves; illegal entries are -inf"""
    masked = np.where(legal_mask, logits, -np.inf)
    top = masked.max(axis=-1, keepdims=True)
    shifted = masked - top
    log_norm = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    return shifted - log_norm


def _check_mask(legal_mask: np.ndarray) -> None:
    if not legal_mask.any(axis=-1).all():
        logger.error("Network forward called with an all-illegal move mask")
        raise InsufficientDataError("Legal-move mask has no legal move")


def forward(params: NetworkParams, obs: np.ndarray, legal_mask: np.ndarray) -> NetworkOutput:
    """
    Evaluate one observation (shape ``(d,)``) or a batch (``(B, d)``).

    Raises:
        InsufficientDataError: a mask row with no legal move
    """
    single = obs.ndim == 1
    obs = np.atleast_2d(obs)
    legal_mask = np.atleast_2d(np.asarray(legal_mask, dtype=bool))
    _check_mask(legal_mask)

    acts = _activations(params, obs)
    prior = np.exp(masked_log_softmax(acts["logits"], legal_mask))

    if single:
        return NetworkOutput(acts["logits"][0], prior[0], float(acts["value"][0]))
    return NetworkOutput(acts["logits"], prior, acts["value"])


def _reg_term(params: NetworkParams, c_reg: float) -> float:
    return c_reg * sum(
        float(np.sum(np.square(params[name], dtype=np.float64))) for name in params.weight_names()
    )


def _components(acts: dict[str, np.ndarray], batch: TrainingBatch, params: NetworkParams, c_reg: float):
    log_p = masked_log_softmax(acts["logits"], batch.legal_masks)
    clamped = np.where(batch.legal_masks, np.maximum(log_p, LOG_EPSILON), 0.0)

    value_err = batch.outcomes - acts["value"]
    value_term = float(np.mean(np.square(value_err, dtype=np.float64)))
    policy_term = float(-np.sum(batch.policies * clamped, dtype=np.float64) / len(batch))
    reg_term = _reg_term(params, c_reg)
    components = LossComponents(
        total=value_term + policy_term + reg_term,
        value=value_term,
        policy=policy_term,
        reg=reg_term,
    )
    return components, log_p, value_err


def loss(params: NetworkParams, batch: TrainingBatch, c_reg: float) -> LossComponents:
    """Value, policy and L2 terms of the training objective over ``batch``"""
    if len(batch) == 0:
        raise InsufficientDataError("Loss needs a nonempty batch")
    _check_mask(batch.legal_masks)
    acts = _activations(params, batch.observations)
    components, _, _ = _components(acts, batch, params, c_reg)
    return components


def loss_and_grad(
    params: NetworkParams, batch: TrainingBatch, c_reg: float
) -> tuple[LossComponents, dict[str, np.ndarray]]:
    """
    Loss components and the gradient of the total for every tensor.

    The clamp on log-probabilities is ignored by the gradient; it only
    matters for priors below 1e-12.
    """
    if len(batch) == 0:
        raise InsufficientDataError("Loss needs a nonempty batch")
    _check_mask(batch.legal_masks)

    acts = _activations(params, batch.observations)
    components, log_p, value_err = _components(acts, batch, params, c_reg)
    size = len(batch)

    prior = np.exp(log_p)
    policy_mass = batch.policies.sum(axis=1, keepdims=True)
    d_logits = (prior * policy_mass - batch.policies) / size
    d_logits = np.where(batch.legal_masks, d_logits, 0.0).astype(params.dtype)

    value = acts["value"]
    d_value_raw = (-2.0 * value_err * (1.0 - value * value) / size)[:, None].astype(params.dtype)

    grads: dict[str, np.ndarray] = {}

    def dense_back(name: str, inputs: np.ndarray, d_out: np.ndarray) -> np.ndarray:
        grads[f"{name}.weight"] = inputs.T @ d_out
        grads[f"{name}.bias"] = d_out.sum(axis=0)
        return d_out @ params[f"{name}.weight"].T

    # policy head
    d_ph = dense_back("policy_out", acts["ph"], d_logits) * (acts["ph"] > 0)
    d_h2 = dense_back("policy_hidden", acts["h2"], d_ph)

    # value head
    d_vh = dense_back("value_out", acts["vh"], d_value_raw) * (acts["vh"] > 0)
    d_h2 = d_h2 + dense_back("value_hidden", acts["h2"], d_vh)

    # torso
    d_h1 = dense_back("torso_2", acts["h1"], d_h2 * (acts["h2"] > 0)) * (acts["h1"] > 0)
    dense_back("torso_1", acts["x"], d_h1)

    for name in params.weight_names():
        grads[name] = grads[name] + 2.0 * c_reg * params[name]

    grads = {name: grad.astype(params.dtype, copy=False) for name, grad in grads.items()}
    return components, grads
