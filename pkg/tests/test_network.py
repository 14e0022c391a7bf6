from __future__ import annotations

import json

import numpy as np
import pytest

from app.errors import InsufficientDataError, MissingInputError, TrainingDivergedError
from app.features.games.domain import GameId
from app.features.games.engine import initial_state, legal_mask, observation, random_playout, replay
from app.features.network.accounting import forward_flops, param_count
from app.features.network.domain import Architecture, NetworkParams, TrainingBatch
from app.features.network.mlp import forward, init_network, loss, loss_and_grad, masked_log_softmax
from app.features.network.optimizer import AdamState, OptimizerConfig, train_step
from app.features.network.repositories.checkpoints import (
    CheckpointHeader,
    CheckpointRepository,
    load_checkpoint,
    save_checkpoint,
)

C4 = GameId.CONNECT_FOUR


def _positions(rng: np.random.Generator, count: int, game: GameId = C4):
    observations, masks = [], []
    while len(observations) < count:
        _, moves = random_playout(initial_state(game), rng)
        state = replay(game, moves[: int(rng.integers(len(moves)))])
        observations.append(observation(state))
        masks.append(legal_mask(state))
    return np.stack(observations), np.stack(masks)


def _batch(rng: np.random.Generator, count: int, dtype=np.float64) -> TrainingBatch:
    observations, masks = _positions(rng, count)
    policies = np.zeros(masks.shape)
    for row, mask in enumerate(masks):
        policies[row, mask] = rng.dirichlet(np.ones(mask.sum()))
    return TrainingBatch(
        observations=observations.astype(dtype),
        legal_masks=masks,
        policies=policies.astype(dtype),
        outcomes=rng.choice([-1.0, 0.0, 1.0], size=count).astype(dtype),
    )


def _zero_network(arch: Architecture) -> NetworkParams:
    params = init_network(arch, seed=0, dtype=np.float64)
    return params.replace({name: np.zeros_like(t) for name, t in params.tensors.items()})


def _jittered(params: NetworkParams, rng: np.random.Generator) -> NetworkParams:
    """Random biases so no hidden unit sits exactly on the rectifier kink"""
    tensors = dict(params.tensors)
    for name, tensor in params.tensors.items():
        if name.endswith(".bias"):
            tensors[name] = rng.normal(0.0, 0.1, tensor.shape)
    return params.replace(tensors)


# ============================================================================
# Architecture and accounting
# ============================================================================


def test_connect_four_width_4_counts() -> None:
    arch = Architecture.for_game(C4, 4)
    assert arch.input_size == 126
    assert arch.action_count == 7
    assert param_count(arch) == 608
    assert forward_flops(arch) == 1184


def test_flop_ratio_of_doubling_the_width() -> None:
    small = forward_flops(Architecture.for_game(C4, 4))
    large = forward_flops(Architecture.for_game(C4, 8))
    assert large == 2560
    assert large / small < 4


def test_param_count_grows_with_width() -> None:
    counts = [param_count(Architecture.for_game(GameId.PENTAGO, w)) for w in range(1, 65)]
    assert all(b > a for a, b in zip(counts, counts[1:]))


def test_init_is_deterministic_in_the_seed() -> None:
    arch = Architecture.for_game(C4, 8)
    a, b, c = init_network(arch, 7), init_network(arch, 7), init_network(arch, 8)
    for name in a.tensors:
        assert np.array_equal(a[name], b[name])
        assert a[name].shape == c[name].shape
    assert not np.array_equal(a["torso_1.weight"], c["torso_1.weight"])
    assert sum(t.size for t in a.tensors.values()) == param_count(arch)


def test_params_are_read_only() -> None:
    params = init_network(Architecture.for_game(C4, 4), 0)
    with pytest.raises(ValueError):
        params["torso_1.bias"][0] = 1.0


# ============================================================================
# Forward pass
# ============================================================================


def test_zero_network_gives_uniform_legal_prior() -> None:
    params = _zero_network(Architecture.for_game(C4, 4))
    state = replay(C4, [3] * 6)
    out = forward(params, observation(state), legal_mask(state))
    assert out.value == 0.0
    assert out.prior[3] == 0.0
    assert out.prior[[0, 1, 2, 4, 5, 6]] == pytest.approx([1 / 6] * 6)


def test_prior_is_a_distribution_over_legal_moves(rng) -> None:
    arch = Architecture.for_game(C4, 8)
    observations, masks = _positions(rng, 100)
    for seed in range(10):
        out = forward(init_network(arch, seed, dtype=np.float64), observations, masks)
        assert np.abs(out.prior.sum(axis=1) - 1).max() <= 1e-9
        assert np.all(out.prior[~masks] == 0.0)
        assert np.all(np.abs(out.value) <= 1)


def test_single_and_batched_forward_agree(rng) -> None:
    params = init_network(Architecture.for_game(GameId.PENTAGO, 8), 3)
    observations, masks = _positions(rng, 5, GameId.PENTAGO)
    batched = forward(params, observations, masks)
    single = forward(params, observations[2], masks[2])
    assert np.allclose(single.prior, batched.prior[2])
    assert single.value == pytest.approx(float(batched.value[2]), abs=1e-6)


def test_log_softmax_ignores_a_constant_shift(rng) -> None:
    logits = rng.normal(size=(50, 7))
    mask = rng.random((50, 7)) < 0.7
    mask[:, 0] = True
    base = np.exp(masked_log_softmax(logits, mask))
    shifted = np.exp(masked_log_softmax(logits + 123.4, mask))
    assert np.abs(base - shifted).max() <= 1e-12


def test_all_illegal_mask_is_rejected() -> None:
    params = init_network(Architecture.for_game(C4, 4), 0)
    with pytest.raises(InsufficientDataError):
        forward(params, np.zeros(126), np.zeros(7, dtype=bool))


# ============================================================================
# Loss and gradient
# ============================================================================


def test_exact_targets_leave_only_the_entropy_and_l2(rng) -> None:
    params = _zero_network(Architecture.for_game(C4, 4))
    observations, masks = _positions(rng, 16)
    policies = masks / masks.sum(axis=1, keepdims=True)
    batch = TrainingBatch(observations, masks, policies, np.zeros(16))
    components = loss(params, batch, c_reg=0.5)
    assert components.value == 0.0
    assert components.reg == 0.0
    assert components.policy == pytest.approx(float(np.mean(np.log(masks.sum(axis=1)))), abs=1e-12)
    assert components.total == pytest.approx(components.policy)


def test_uniform_prior_cross_entropy_is_log_k(rng) -> None:
    params = _zero_network(Architecture.for_game(C4, 4))
    batch = _batch(rng, 32)
    components = loss(params, batch, c_reg=0.0)
    # a uniform prior scores log k against any target on k legal moves
    expected = np.mean(np.log(batch.legal_masks.sum(axis=1)))
    assert components.policy == pytest.approx(float(expected), abs=1e-12)


def test_l2_term_covers_weights_only() -> None:
    params = init_network(Architecture.for_game(C4, 4), 5, dtype=np.float64)
    tensors = dict(params.tensors)
    tensors["torso_1.bias"] = np.full(4, 10.0)
    params = params.replace(tensors)
    batch = TrainingBatch(np.zeros((1, 126)), np.ones((1, 7), dtype=bool), np.full((1, 7), 1 / 7), np.zeros(1))

    c_reg = 1e-4
    expected = c_reg * sum(float(np.sum(params[name] ** 2)) for name in params.weight_names())
    assert loss(params, batch, c_reg).reg == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("width", [4, 16])
def test_gradient_matches_finite_differences(width, rng) -> None:
    params = _jittered(init_network(Architecture.for_game(C4, width), 11, dtype=np.float64), rng)
    batch = _batch(rng, 8)
    c_reg = 1e-3
    _, grads = loss_and_grad(params, batch, c_reg)

    eps = 1e-6
    for name, tensor in params.tensors.items():
        numeric = np.zeros_like(tensor)
        for index in np.ndindex(tensor.shape):
            plus, minus = tensor.copy(), tensor.copy()
            plus[index] += eps
            minus[index] -= eps
            up = loss(params.replace({**params.tensors, name: plus}), batch, c_reg).total
            down = loss(params.replace({**params.tensors, name: minus}), batch, c_reg).total
            numeric[index] = (up - down) / (2 * eps)
        error = np.linalg.norm(grads[name] - numeric) / max(np.linalg.norm(grads[name]) + np.linalg.norm(numeric), 1e-12)
        assert error <= 1e-4, name


def test_empty_batch_is_rejected() -> None:
    params = init_network(Architecture.for_game(C4, 4), 0)
    batch = TrainingBatch(np.zeros((0, 126)), np.zeros((0, 7), dtype=bool), np.zeros((0, 7)), np.zeros(0))
    with pytest.raises(InsufficientDataError):
        loss(params, batch, 0.0)


# ============================================================================
# Optimizer
# ============================================================================


def test_stationary_point_is_left_unchanged(rng) -> None:
    params = _zero_network(Architecture.for_game(C4, 4))
    observations, masks = _positions(rng, 16)
    batch = TrainingBatch(observations, masks, masks / masks.sum(axis=1, keepdims=True), np.zeros(16))
    updated, state, _ = train_step(params, batch, AdamState.zeros_like(params), OptimizerConfig(weight_decay=0.0))
    assert state.step == 1
    for name in params.tensors:
        assert np.array_equal(updated[name], params[name])


def test_policy_loss_falls_on_a_fixed_batch(rng) -> None:
    params = init_network(Architecture.for_game(C4, 16), 2)
    batch = _batch(rng, 64, dtype=np.float32)
    cfg = OptimizerConfig(weight_decay=0.0)
    state = AdamState.zeros_like(params)
    policy = []
    for _ in range(50):
        params, state, components = train_step(params, batch, state, cfg)
        policy.append(components.policy)
    windows = [np.mean(policy[i : i + 10]) for i in range(0, 50, 10)]
    assert all(b < a for a, b in zip(windows, windows[1:]))
    assert policy[-1] < policy[0]


def test_training_is_deterministic(rng) -> None:
    batch = _batch(rng, 32, dtype=np.float32)
    cfg = OptimizerConfig()
    runs = []
    for _ in range(2):
        params = init_network(Architecture.for_game(C4, 8), 4)
        state = AdamState.zeros_like(params)
        for _ in range(5):
            params, state, _ = train_step(params, batch, state, cfg)
        runs.append(params)
    for name in runs[0].tensors:
        assert np.array_equal(runs[0][name], runs[1][name])


def test_non_finite_loss_raises() -> None:
    params = init_network(Architecture.for_game(C4, 4), 0)
    batch = TrainingBatch(
        np.full((1, 126), np.nan, dtype=np.float32),
        np.ones((1, 7), dtype=bool),
        np.full((1, 7), 1 / 7, dtype=np.float32),
        np.zeros(1, dtype=np.float32),
    )
    with pytest.raises(TrainingDivergedError):
        train_step(params, batch, AdamState.zeros_like(params), OptimizerConfig())


# ============================================================================
# Checkpoints
# ============================================================================


def _header(step: int = 10, **overrides) -> CheckpointHeader:
    return CheckpointHeader(game=C4, architecture=Architecture.for_game(C4, 4), seed=3, step=step, **overrides)


def test_checkpoint_round_trip_is_exact(tmp_path, rng) -> None:
    params = init_network(Architecture.for_game(C4, 4), 9)
    path = save_checkpoint(tmp_path / "step.npz", params, _header())
    loaded, header = load_checkpoint(path)
    assert header == _header()

    observations, masks = _positions(rng, 10)
    before, after = forward(params, observations, masks), forward(loaded, observations, masks)
    assert np.array_equal(before.prior, after.prior)
    assert np.array_equal(before.value, after.value)


def test_missing_checkpoint(tmp_path) -> None:
    with pytest.raises(MissingInputError):
        load_checkpoint(tmp_path / "absent.npz")


def test_future_checkpoint_version_is_rejected(tmp_path) -> None:
    params = init_network(Architecture.for_game(C4, 4), 9)
    path = tmp_path / "future.npz"
    arrays = dict(params.tensors)
    arrays["__header__"] = np.array(json.dumps({**_header().model_dump(mode="json"), "format_version": 99}))
    np.savez(path, **arrays)
    with pytest.raises(MissingInputError, match="format version"):
        load_checkpoint(path)


def test_checkpoint_repository_lists_steps(tmp_path) -> None:
    params = init_network(Architecture.for_game(C4, 4), 9)
    repository = CheckpointRepository(tmp_path)
    for step in (5, 1, 2):
        repository.save(params, _header(step))
    repository.save(params, _header(7, diverged=True))
    assert repository.steps() == [1, 2, 5]
    assert repository.find_latest() == repository.path_for(5)
    assert repository.load(2)[1].step == 2
