from __future__ import annotations

import math

import numpy as np
import pytest

from app.errors import UnsupportedGameError
from app.features.games import connect_four
from app.features.games.codec import canonical_codec
from app.features.games.domain import GameId, GameState
from app.features.games.engine import apply_move, initial_state, random_playout, replay, terminal_status
from app.features.solver.domain import ILLEGAL_Q, QVector, SolverAgentConfig
from app.features.solver.negamax import ConnectFourSolver, get_solver, naive_solve, naive_value
from app.features.solver.policy import solver_agent_move, solver_policy
from app.features.solver.repositories.solver_cache import SolverCacheRepository

C4 = GameId.CONNECT_FOUR


def _deep_positions(rng: np.random.Generator, min_stones: int, count: int) -> list[GameState]:
    """Non-terminal positions with at least ``min_stones`` stones, taken from random games"""
    positions = []
    for _ in range(200 * count):
        _, moves = random_playout(initial_state(C4), rng)
        if len(moves) <= min_stones:
            continue
        ply = int(rng.integers(min_stones, len(moves)))
        positions.append(replay(C4, moves[:ply]))
        if len(positions) == count:
            break
    return positions


def _draw_in_one() -> GameState:
    """Full-board draw with the top of column 0 still empty"""
    boards = [0, 0]
    for col in range(7):
        for row in range(6):
            if (col, row) == (0, 5):
                continue
            boards[((row // 2) + col) % 2] |= 1 << (col * 7 + row)
    return GameState(C4, (boards[0], boards[1]), 1, 41)


# ============================================================================
# Q-vectors
# ============================================================================


def test_win_with_the_seventh_stone_scores_35() -> None:
    state = replay(C4, [0, 6, 1, 6, 2, 5])
    assert connect_four.is_winning_move(state, 3)
    assert ConnectFourSolver(tt_log2=16).value(state) == 35


def test_forced_draw_scores_zero() -> None:
    state = _draw_in_one()
    assert not terminal_status(state).is_terminal
    q = ConnectFourSolver(tt_log2=16).solve(state)
    assert q.moves == (0,)
    assert q.values == (0,)


def test_double_threat_loses_on_every_move() -> None:
    state = replay(C4, [6, 1, 6, 2, 5, 3])
    q = ConnectFourSolver(tt_log2=16).solve(state)
    assert q.moves == tuple(range(7))
    assert set(q.values) == {-(42 - 8)}


def test_immediate_wins_score_by_ply() -> None:
    solver = ConnectFourSolver(tt_log2=16)
    assert solver.value(replay(C4, [0, 6, 1, 6, 2, 5, 4, 4])) == 42 - 9
    assert solver.value(replay(C4, [0, 6, 1, 6, 2, 5])) == 42 - 7


def test_terminal_positions_cannot_be_solved() -> None:
    state = replay(C4, [0, 0, 1, 1, 2, 2, 3])
    with pytest.raises(ValueError):
        ConnectFourSolver(tt_log2=16).solve(state)


def test_pentago_is_not_solvable() -> None:
    with pytest.raises(UnsupportedGameError):
        ConnectFourSolver(tt_log2=16).solve(initial_state(GameId.PENTAGO))


def test_matches_exhaustive_negamax_on_deep_positions(rng) -> None:
    solver = ConnectFourSolver(tt_log2=16)
    positions = _deep_positions(rng, min_stones=34, count=40)
    assert positions
    for state in positions:
        assert solver.solve(state) == naive_solve(state)


@pytest.mark.expensive
def test_matches_exhaustive_negamax_from_28_stones(rng) -> None:
    solver = get_solver()
    for state in _deep_positions(rng, min_stones=28, count=500):
        assert solver.solve(state) == naive_solve(state)


def test_transposition_table_does_not_change_results(rng) -> None:
    with_table = ConnectFourSolver(tt_log2=12)
    without_table = ConnectFourSolver(tt_log2=None)
    for state in _deep_positions(rng, min_stones=30, count=20):
        assert with_table.solve(state) == without_table.solve(state)


def test_best_move_hands_the_opponent_the_negated_value(rng) -> None:
    solver = ConnectFourSolver(tt_log2=16)
    for state in _deep_positions(rng, min_stones=32, count=30):
        q = solver.solve(state)
        move = q.optimal_moves()[0]
        child = apply_move(state, move)
        if terminal_status(child).is_terminal:
            assert q.best >= 0
            continue
        assert solver.value(child) == -q.best
        assert solver.value(state) == q.best
        assert naive_value(state) == q.best


def test_scores_stay_on_the_ply_lattice(rng) -> None:
    solver = ConnectFourSolver(tt_log2=16)
    for state in _deep_positions(rng, min_stones=33, count=20):
        for value in solver.solve(state).values:
            assert -41 <= value <= 41
            assert value == 0 or abs(value) >= 1


def test_q_vector_columns() -> None:
    q = QVector((0, 2, 6), (3, -1, 0))
    assert q.as_columns() == [3, ILLEGAL_Q, -1, ILLEGAL_Q, ILLEGAL_Q, ILLEGAL_Q, 0]
    assert QVector.from_columns(q.as_columns()) == q
    assert q.optimal_moves() == (0,)


# ============================================================================
# Cache
# ============================================================================


def test_cache_serves_solved_positions(tmp_path, rng) -> None:
    path = tmp_path / "solver_cache.csv"
    state = _deep_positions(rng, min_stones=32, count=1)[0]

    first = ConnectFourSolver(tt_log2=16, cache=SolverCacheRepository(path))
    q = first.solve(state)
    line = path.read_text().strip()
    assert line.split(",")[0] == canonical_codec(state)
    assert len(line.split(",")) == 8

    second = ConnectFourSolver(tt_log2=16, cache=SolverCacheRepository(path))
    assert second.solve(state) == q
    assert second.node_count == 0


def test_cache_skips_malformed_lines(tmp_path) -> None:
    path = tmp_path / "solver_cache.csv"
    path.write_text("44,1,2\n4,0,0,0,0,0,0,0\n")
    cache = SolverCacheRepository(path)
    assert cache.find_by_codec("4") == QVector(tuple(range(7)), (0,) * 7)
    assert cache.find_by_codec("44") is None


# ============================================================================
# Solver agents
# ============================================================================


def test_zero_temperature_splits_over_best_moves() -> None:
    probs = solver_policy(QVector((0, 1, 2), (3, 3, -5)), SolverAgentConfig(temperature=0))
    assert probs == pytest.approx([0.5, 0.5, 0.0])


def test_infinite_temperature_is_uniform() -> None:
    probs = solver_policy(QVector((0, 1, 2, 3), (9, -3, 0, 1)), SolverAgentConfig(temperature="inf"))
    assert probs == pytest.approx([0.25] * 4)


def test_unit_temperature_softmax() -> None:
    probs = solver_policy(QVector((0, 1), (1, 0)), SolverAgentConfig(temperature=1))
    assert probs == pytest.approx([math.e / (math.e + 1), 1 / (math.e + 1)], abs=1e-12)


def test_temperature_labels() -> None:
    assert SolverAgentConfig(temperature="inf").label == "inf"
    assert SolverAgentConfig(temperature=0.5).label == "0.5"


def test_zero_temperature_agent_plays_the_unique_win(rng) -> None:
    solver = ConnectFourSolver(tt_log2=16)
    checked = 0
    for state in _deep_positions(rng, min_stones=32, count=60):
        q = solver.solve(state)
        if q.best <= 0 or len(q.optimal_moves()) != 1:
            continue
        checked += 1
        for _ in range(5):
            assert solver_agent_move(state, SolverAgentConfig(temperature=0), rng, solver) == q.optimal_moves()[0]
    assert checked > 0


def test_infinite_temperature_agent_samples_uniformly(rng) -> None:
    state = _draw_in_one()
    assert solver_agent_move(state, SolverAgentConfig(temperature="inf"), rng) == 0

    deep = _deep_positions(rng, min_stones=34, count=1)[0]
    solver = ConnectFourSolver(tt_log2=16)
    moves = solver.solve(deep).moves
    counts = np.zeros(7)
    draws = 10_000
    for _ in range(draws):
        counts[solver_agent_move(deep, SolverAgentConfig(temperature="inf"), rng, solver)] += 1
    observed = counts[list(moves)]
    expected = draws / len(moves)
    chi_square = float(np.sum((observed - expected) ** 2 / expected))
    # 99.9% quantile of chi-square with at most 6 degrees of freedom
    assert chi_square < 22.5
