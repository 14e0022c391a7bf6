from __future__ import annotations

import json
import math

import numpy as np
import pytest

from app.errors import InsufficientDataError, MissingInputError, UnsupportedGameError
from app.features.arena.rating import expected_score
from app.features.arena.schemas import RatingEntry
from app.features.games.domain import GameId
from app.features.network.accounting import forward_flops, param_count
from app.features.network.domain import Architecture
from app.features.network.mlp import init_network
from app.features.network.repositories.checkpoints import CheckpointHeader, CheckpointRepository
from app.features.scaling.domain import Aggregation, Axis, exponent_from_slope
from app.features.scaling.efficiency import geometric_mean, sample_efficiency_table
from app.features.scaling.fits import (
    bootstrap_exponent,
    expected_score_from_resources,
    exponent_convergence,
    fit_compute_scaling,
    fit_size_scaling,
    optimal_size_law,
    pareto_front,
    predicted_elo_gap,
    seed_mean_points,
)
from app.features.scaling.points import build_agent_points, load_agent_points
from app.features.scaling.repositories import AgentPointRepository, HeldOutLossRepository, SizeScalingRepository
from app.features.scaling.schemas import AgentPoint, LossReport, ScalingFit
from app.features.scaling.service import analyze, export_bundle
from app.features.scaling.test_set import build_solver_test_set, eval_test_loss, prediction_losses
from app.features.training.ledger import ledger_entry
from app.features.training.repositories import LedgerRepository

C4 = GameId.CONNECT_FOUR

# Elo slope per decade of parameters at each checkpoint of the synthetic grid
_SLOPES = {1: 200.0, 2: 300.0, 3: 352.0}


def _point(agent_id: str, params: int, compute: float, elo: float, **extra) -> AgentPoint:
    fields = {"width": 4, "seed": 0, "step": 1, "states": 1000}
    fields.update(extra)
    return AgentPoint(agent_id=agent_id, params=params, compute=compute, elo=elo, **fields)


def _grid() -> list[AgentPoint]:
    """Four widths, two seeds, three checkpoints; Elo linear in log10 N at every step"""
    points = []
    for index, width in enumerate((4, 8, 16, 32)):
        params = 600 * 4**index
        for seed in (0, 1):
            for step, slope in _SLOPES.items():
                points.append(
                    _point(
                        f"w{width}-s{seed}-t{step}",
                        params=params,
                        compute=step * params * 1e6,
                        elo=slope * math.log10(params) + 5.0 * seed,
                        width=width,
                        seed=seed,
                        step=step,
                        states=step * 1000,
                    )
                )
    return points


def _fit(axis: Axis, exponent: float) -> ScalingFit:
    return ScalingFit(axis=axis, slope=400.0 * exponent, exponent=exponent, intercept=0.0, points=3)


# ============================================================================
# Expected score and exponents
# ============================================================================


def test_expected_score_from_resources() -> None:
    assert expected_score_from_resources(5.0, 5.0, 0.88) == pytest.approx(0.5)
    assert expected_score_from_resources(2.0, 1.0, 1.0) == pytest.approx(2 / 3)
    assert expected_score_from_resources(1e6, 1.0, 0.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        expected_score_from_resources(0.0, 1.0, 1.0)


def test_exponent_from_slope() -> None:
    assert exponent_from_slope(352.0) == pytest.approx(0.88)
    assert exponent_from_slope(220.0) == pytest.approx(0.55)


# ============================================================================
# Size scaling
# ============================================================================


def test_size_fit_recovers_the_exponent() -> None:
    points = [
        _point(f"n{params}", params=params, compute=1.0, elo=352.0 * math.log10(params) - 900.0)
        for params in (608, 2560, 10_000, 40_000, 150_000)
    ]
    fit = fit_size_scaling(points)
    assert fit.exponent == pytest.approx(0.88, abs=1e-9)
    assert fit.residual_rms == pytest.approx(0.0, abs=1e-8)
    assert fit.pearson_r == pytest.approx(1.0)
    assert fit.predict(10_000) == pytest.approx(352.0 * 4 - 900.0)


def test_plateau_points_are_excluded() -> None:
    points = [
        _point(f"n{params}", params=params, compute=1.0, elo=352.0 * math.log10(params), solver_gap=200.0)
        for params in (100, 1000, 10_000)
    ]
    points.append(_point("saturated", params=10**6, compute=1.0, elo=0.0, solver_gap=3.0))
    fit = fit_size_scaling(points)
    assert fit.excluded == ["saturated"]
    assert fit.points == 3
    assert fit.exponent == pytest.approx(0.88)


def test_size_fit_needs_three_sizes() -> None:
    everything_saturated = [
        _point(f"n{params}", params=params, compute=1.0, elo=1.0, solver_gap=0.0) for params in (100, 1000, 10_000)
    ]
    with pytest.raises(InsufficientDataError):
        fit_size_scaling(everything_saturated)

    two_sizes = [_point(f"p{i}", params=100 * (1 + i % 2), compute=1.0, elo=float(i), seed=i) for i in range(6)]
    with pytest.raises(InsufficientDataError):
        fit_size_scaling(two_sizes)


def test_mean_and_agent_aggregation() -> None:
    final = [p for p in _grid() if p.step == 3]
    by_mean = fit_size_scaling(final, aggregation=Aggregation.MEAN)
    by_agent = fit_size_scaling(final, aggregation=Aggregation.AGENTS)
    assert by_mean.points == 4
    assert by_agent.points == 8
    assert by_mean.exponent == pytest.approx(0.88)
    assert by_agent.exponent == pytest.approx(0.88)


def test_resource_scores_agree_with_fitted_elo() -> None:
    fit = fit_size_scaling([p for p in _grid() if p.step == 3])
    sizes = [600.0, 2400.0, 9600.0, 38400.0]
    for n_i in sizes:
        for n_j in sizes:
            gap = predicted_elo_gap(fit, n_i, n_j)
            assert gap == pytest.approx(fit.predict(n_i) - fit.predict(n_j), abs=1e-9)
            from_resources = expected_score_from_resources(n_i, n_j, fit.exponent)
            assert from_resources == pytest.approx(expected_score(fit.predict(n_i), fit.predict(n_j)), abs=1e-9)

    # four times the parameters
    assert predicted_elo_gap(fit, 2400.0, 600.0) == pytest.approx(352.0 * math.log10(4.0))


# ============================================================================
# Pareto front and compute scaling
# ============================================================================


def _brute_force_front(points: list[AgentPoint]) -> list[str]:
    members = []
    for compute in sorted({p.compute for p in points}):
        at = [p for p in points if p.compute == compute]
        best = min(at, key=lambda p: (-p.elo, p.agent_id))
        cheaper = [p.elo for p in points if p.compute < compute]
        if not cheaper or best.elo > max(cheaper):
            members.append(best.agent_id)
    return members


def test_pareto_front_small_cases() -> None:
    single = _point("a", params=1, compute=1.0, elo=0.0)
    assert pareto_front([single]).ids == ["a"]

    worse_and_costlier = _point("b", params=1, compute=2.0, elo=-10.0)
    assert pareto_front([worse_and_costlier, single]).ids == ["a"]

    with pytest.raises(InsufficientDataError):
        pareto_front([])


@pytest.mark.parametrize("size", [10, 200, 1000])
def test_pareto_front_matches_brute_force(size, rng) -> None:
    points = [
        # integer computes force ties
        _point(f"p{i}", params=1, compute=float(rng.integers(1, size // 2 + 2)), elo=float(rng.normal(0.0, 100.0)))
        for i in range(size)
    ]
    front = pareto_front(points)
    assert front.ids == _brute_force_front(points)
    elos = [p.elo for p in front.members]
    assert elos == sorted(elos)


def test_compute_fit_on_a_synthetic_front(rng) -> None:
    computes = [1e10, 1e11, 1e12, 1e13, 1e14]
    points = [_point(f"c{i}", params=1, compute=c, elo=220.0 * math.log10(c)) for i, c in enumerate(computes)]
    dominated = [_point(f"d{i}", params=1, compute=c * 3, elo=0.0) for i, c in enumerate(computes)]
    everything = points + dominated

    fit = fit_compute_scaling(pareto_front(everything))
    assert fit.exponent == pytest.approx(0.55)
    assert fit.points == 5

    shuffled = [everything[i] for i in rng.permutation(len(everything))]
    assert fit_compute_scaling(pareto_front(shuffled)) == fit


def test_compute_fit_needs_three_members() -> None:
    with pytest.raises(InsufficientDataError):
        fit_compute_scaling(pareto_front([_point("a", params=1, compute=1.0, elo=0.0)]))


@pytest.mark.parametrize("scale", [1e-6, 3.0, 1e4])
def test_rescaling_compute_only_moves_the_intercept(scale) -> None:
    points = _grid()
    rescaled = [p.model_copy(update={"compute": p.compute * scale}) for p in points]
    fit = fit_compute_scaling(pareto_front(seed_mean_points(points)))
    moved = fit_compute_scaling(pareto_front(seed_mean_points(rescaled)))
    assert moved.exponent == pytest.approx(fit.exponent, abs=1e-9)
    assert moved.intercept == pytest.approx(fit.intercept - fit.slope * math.log10(scale))

    size_fit = fit_size_scaling([p for p in points if p.step == 3])
    law = optimal_size_law(size_fit, fit, pareto_front(seed_mean_points(points)))
    moved_law = optimal_size_law(size_fit, moved, pareto_front(seed_mean_points(rescaled)))
    assert moved_law.exponent == pytest.approx(law.exponent, abs=1e-9)
    assert moved_law.c0 == pytest.approx(law.c0 * scale)


# ============================================================================
# Optimal model size
# ============================================================================


def _optimal_front(c0: float, exponent: float) -> list[AgentPoint]:
    return [
        _point(f"f{i}", params=int(round((c / c0) ** exponent)), compute=c, elo=100.0 * i)
        for i, c in enumerate([1e9, 1e10, 1e11, 1e12])
    ]


def test_optimal_size_exponent_identity() -> None:
    front = pareto_front(_optimal_front(1e4, 0.625))
    law = optimal_size_law(_fit(Axis.PARAMS, 0.88), _fit(Axis.COMPUTE, 0.55), front)
    assert law.exponent == pytest.approx(0.625, abs=1e-12)
    assert law.exponent == 0.55 / 0.88

    equal = optimal_size_law(_fit(Axis.PARAMS, 0.7), _fit(Axis.COMPUTE, 0.7), front)
    assert equal.exponent == 1.0


def test_optimal_size_recovers_c0() -> None:
    c0 = 1e4
    front = pareto_front(_optimal_front(c0, 0.55 / 0.88))
    law = optimal_size_law(_fit(Axis.PARAMS, 0.88), _fit(Axis.COMPUTE, 0.55), front)
    assert law.c0 == pytest.approx(c0, rel=0.01)
    assert law.optimal_params(1e11) == pytest.approx((1e11 / c0) ** law.exponent)
    assert law.members == front.ids


def test_optimal_size_needs_a_positive_size_exponent() -> None:
    front = pareto_front(_optimal_front(1e4, 0.5))
    with pytest.raises(InsufficientDataError):
        optimal_size_law(_fit(Axis.PARAMS, 0.0), _fit(Axis.COMPUTE, 0.55), front)


# ============================================================================
# Bootstrap, sample efficiency and convergence
# ============================================================================


def test_bootstrap_over_seeds() -> None:
    final = [p for p in _grid() if p.step == 3]
    interval = bootstrap_exponent(final, Axis.PARAMS, np.random.default_rng(0), samples=50)
    assert interval.estimate == pytest.approx(0.88)
    assert interval.low <= interval.estimate <= interval.high
    assert interval.low == pytest.approx(0.88)
    assert interval.samples == 50

    with pytest.raises(InsufficientDataError):
        bootstrap_exponent([p for p in final if p.seed == 0], Axis.PARAMS, np.random.default_rng(0))


def test_bootstrap_is_reproducible(rng) -> None:
    noisy = [p.model_copy(update={"elo": p.elo + float(rng.normal(0.0, 20.0))}) for p in _grid() if p.step == 3]
    first = bootstrap_exponent(noisy, Axis.PARAMS, np.random.default_rng(7), samples=40)
    second = bootstrap_exponent(noisy, Axis.PARAMS, np.random.default_rng(7), samples=40)
    assert first == second


def test_geometric_mean() -> None:
    assert geometric_mean([7.0]) == pytest.approx(7.0)
    assert geometric_mean([1.0, 100.0]) == pytest.approx(10.0)


def test_sample_efficiency_orders_widths() -> None:
    table = sample_efficiency_table(_grid())
    assert len(table.curves) == 12
    assert table.larger_more_efficient
    first = table.curves[0]
    assert (first.width, first.step, first.seeds) == (4, 1, 2)
    assert first.states == pytest.approx(1000.0)
    assert sum(row.agents for row in table.front_data) == len(pareto_front(_grid()))

    flipped = [p.model_copy(update={"elo": -p.elo}) for p in _grid()]
    assert not sample_efficiency_table(flipped).larger_more_efficient


def test_single_run_curve_echoes_its_points() -> None:
    run = [p for p in _grid() if p.width == 8 and p.seed == 0]
    table = sample_efficiency_table(run)
    assert [(row.step, row.states) for row in table.curves] == [(1, 1000.0), (2, 2000.0), (3, 3000.0)]
    assert not table.larger_more_efficient


def test_exponent_convergence_series() -> None:
    series = exponent_convergence(_grid())
    assert [row.step for row in series.rows] == [1, 2, 3]
    assert series.exponents == pytest.approx([0.5, 0.75, 0.88])
    assert series.increasing and series.non_decreasing

    flat = exponent_convergence([p.model_copy(update={"elo": 352.0 * math.log10(p.params)}) for p in _grid()])
    assert flat.exponents == pytest.approx([0.88] * 3)
    assert not flat.increasing
    assert flat.non_decreasing


# ============================================================================
# Solver-annotated test set
# ============================================================================


@pytest.fixture
def deep_test_set():
    return build_solver_test_set(12, np.random.default_rng(5), min_stones=34)


def test_test_set_annotations(deep_test_set) -> None:
    assert len(deep_test_set) == 12
    assert len(set(deep_test_set.transcripts)) == 12
    assert all(len(t) >= 34 for t in deep_test_set.transcripts)
    assert set(deep_test_set.values.tolist()) <= {-1.0, 0.0, 1.0}
    np.testing.assert_allclose(deep_test_set.priors.sum(axis=1), 1.0)
    assert not np.any(deep_test_set.priors[~deep_test_set.legal_masks])


def test_perfect_predictor_has_no_excess_loss(deep_test_set) -> None:
    report = prediction_losses(deep_test_set.priors, deep_test_set.values, deep_test_set)
    assert report.value_loss == 0.0
    assert report.policy_excess == pytest.approx(0.0, abs=1e-12)
    assert report.irreducible_loss == pytest.approx(float(np.mean(np.log(deep_test_set.optimal_counts))))


def test_baselines_match_their_closed_forms(deep_test_set) -> None:
    masks = deep_test_set.legal_masks
    uniform = masks / masks.sum(axis=1, keepdims=True)
    report = prediction_losses(uniform, np.zeros(len(deep_test_set)), deep_test_set)
    assert report.policy_loss == pytest.approx(report.uniform_policy_loss, abs=1e-12)
    assert report.value_loss == pytest.approx(report.draw_value_loss)
    assert report.draw_value_loss == pytest.approx(float(np.mean(deep_test_set.values**2)))


def test_network_test_loss(deep_test_set) -> None:
    params = init_network(Architecture.for_game(C4, 4), 0)
    report = eval_test_loss(params, deep_test_set, agent_id="net:w4")
    assert report.agent_id == "net:w4"
    assert report.states == 12
    # cross-entropy against the optimal-move prior is bounded below by its entropy
    assert report.policy_excess >= -1e-9


def test_test_set_is_connect_four_only() -> None:
    with pytest.raises(UnsupportedGameError):
        build_solver_test_set(3, np.random.default_rng(0), game=GameId.PENTAGO)


@pytest.mark.expensive
def test_irreducible_loss_of_random_playouts() -> None:
    test_set = build_solver_test_set(10_000, np.random.default_rng(0))
    assert test_set.irreducible_loss == pytest.approx(0.336, abs=0.05)


# ============================================================================
# Agent points and the analysis bundle
# ============================================================================


def _run_with_checkpoint(tmp_path, width: int, step: int, states: int) -> str:
    run_dir = tmp_path / f"w{width}"
    arch = Architecture.for_game(C4, width)
    path = CheckpointRepository(run_dir).save(
        init_network(arch, 0), CheckpointHeader(game=C4, architecture=arch, seed=0, step=step)
    )
    LedgerRepository(run_dir).append(
        ledger_entry(
            step=step,
            simulations=4,
            forward_flops=forward_flops(arch),
            data_per_step=16,
            states=states,
            games=3,
            evaluations=10,
        )
    )
    return f"net:{path}"


def test_build_agent_points(tmp_path) -> None:
    small = _run_with_checkpoint(tmp_path, 4, step=2, states=300)
    large = _run_with_checkpoint(tmp_path, 8, step=2, states=300)
    ratings = [
        RatingEntry(agent_id="random", elo=0.0, games=10, uncertainty=30.0),
        RatingEntry(agent_id="solver:0", elo=900.0, games=10, uncertainty=30.0),
        RatingEntry(agent_id=small, elo=100.0, games=10, uncertainty=30.0),
        RatingEntry(agent_id=large, elo=250.0, games=10, uncertainty=30.0),
    ]
    points = build_agent_points(ratings, benchmark_id="solver:0")
    assert [p.agent_id for p in points] == [small, large]

    first = points[0]
    arch = Architecture.for_game(C4, 4)
    assert first.params == param_count(arch) == 608
    assert first.compute == float(2 * 4 * forward_flops(arch) * 16)
    assert (first.width, first.step, first.states) == (4, 2, 300)
    assert first.solver_gap == 800.0

    table = AgentPointRepository(tmp_path / "agents.csv")
    table.create_many(points)
    assert load_agent_points(table.path) == points


def test_agent_points_errors(tmp_path) -> None:
    orphan = _run_with_checkpoint(tmp_path, 4, step=1, states=10)
    (tmp_path / "w4" / "ledger.csv").unlink()
    ratings = [RatingEntry(agent_id=orphan, elo=0.0, games=1, uncertainty=1.0)]
    with pytest.raises(InsufficientDataError):
        build_agent_points(ratings)
    with pytest.raises(MissingInputError):
        build_agent_points(ratings, benchmark_id="solver:0")
    with pytest.raises(MissingInputError):
        load_agent_points(tmp_path / "absent.csv")


def test_analysis_bundle(tmp_path) -> None:
    points = _grid()
    analysis = analyze(points, rng=np.random.default_rng(0))
    assert analysis.size_fit.exponent == pytest.approx(0.88)
    assert analysis.compute_fit is not None
    assert analysis.optimal_size is not None
    assert analysis.optimal_size.exponent == pytest.approx(analysis.compute_fit.exponent / 0.88)
    assert analysis.summary().startswith("alpha_N = 0.880000")

    losses = [
        LossReport(
            agent_id="w4-s0-t3",
            states=12,
            value_loss=0.7,
            policy_loss=1.2,
            irreducible_loss=0.3,
            policy_excess=0.9,
            draw_value_loss=1.0,
            uniform_policy_loss=1.9,
        )
    ]
    files = export_bundle(analysis, points, tmp_path / "out", test_loss=losses)
    names = {path.name for path in files}
    assert names == {
        "fig2_size.csv",
        "fig4_compute.csv",
        "fig1_optimal.csv",
        "fig6_efficiency.csv",
        "fig11_testloss.csv",
        "exponent_convergence.csv",
        "fits.json",
        "reference_points.json",
    }
    assert len(SizeScalingRepository(tmp_path / "out" / "fig2_size.csv").find_all()) == 8
    assert HeldOutLossRepository(tmp_path / "out" / "fig11_testloss.csv").find_all() == losses
    fits = json.loads((tmp_path / "out" / "fits.json").read_text())
    assert fits["front"] == analysis.front.ids
    assert fits["elo_per_doubling"]["params"] == pytest.approx(352.0 * math.log10(2.0))

    again = export_bundle(analysis, points, tmp_path / "out")
    again_names = {path.name for path in again}
    assert "fig2_size.v2.csv" in again_names
    assert not any(name.startswith("fig11") for name in again_names)
