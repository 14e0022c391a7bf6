import logging
import sys

# Log configuration (before other imports)
# ruff: noqa: E402
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    force=True
)

import argparse  # noqa: E402
import math  # noqa: E402
from pathlib import Path  # noqa: E402
from typing import Optional  # noqa: E402

import numpy as np  # noqa: E402

from app.config import LOG_LEVEL, RUNS_DIR, WORKERS, describe_keys, load_key_value_config  # noqa: E402
from app.errors import EXIT_OK, EXIT_RUNTIME, ConfigError, LabError, MissingInputError  # noqa: E402
from app.features.arena import (  # noqa: E402
    MatchConfig,
    Schedule,
    fit_ratings,
    load_matches,
    run_inference_tournament,
    run_tournament,
)
from app.features.arena.repositories import RatingsRepository  # noqa: E402
from app.features.experiments import RunStatus, SweepConfig, run_sweep  # noqa: E402
from app.features.games import GameId  # noqa: E402
from app.features.network.repositories import CheckpointRepository, load_checkpoint  # noqa: E402
from app.features.scaling import (  # noqa: E402
    PLATEAU_THRESHOLD,
    TEST_LOSS_TABLE,
    Aggregation,
    analyze,
    build_agent_points,
    build_solver_test_set,
    eval_test_loss,
    export_bundle,
    load_agent_points,
)
from app.features.scaling.repositories import AgentPointRepository, HeldOutLossRepository  # noqa: E402
from app.features.solver.domain import SolverAgentConfig  # noqa: E402
from app.features.training import TrainRunConfig, run_training  # noqa: E402

logger = logging.getLogger("app.main")


def _floats(text: str) -> list[float]:
    return [SolverAgentConfig(temperature=part.strip()).temperature for part in text.split(",") if part.strip()]


def _ints(text: str) -> list[int]:
    return [int(float(part)) for part in text.split(",") if part.strip()]


def _game(text: str) -> GameId:
    try:
        return GameId.parse(text)
    except ConfigError as e:
        raise argparse.ArgumentTypeError(e.detail)


def _pool(agents: Optional[list[str]], run_dirs: Optional[list[str]]) -> list[str]:
    """Explicit agent ids plus every checkpoint of the given run directories"""
    pool = list(agents or [])
    for run_dir in run_dirs or []:
        repository = CheckpointRepository(run_dir)
        steps = repository.steps()
        if not steps:
            raise MissingInputError(f"No checkpoints in {run_dir}")
        pool.extend(f"net:{repository.path_for(step)}" for step in steps)
    return pool


def _match_config(args) -> MatchConfig:
    return MatchConfig(
        game=args.game,
        temperature=args.temperature,
        simulations=args.simulations,
        games_per_pair=args.games_per_pair,
        seed=args.seed,
        opening_plies=args.opening_plies,
        sparse_degree=getattr(args, "degree", 4),
    )


# ============================================================================
# SUBCOMMANDS
# ============================================================================


def cmd_train(args) -> int:
    cfg = load_key_value_config(args.config, TrainRunConfig)
    run_dir = Path(args.run_dir) if args.run_dir else Path(RUNS_DIR) / Path(args.config).stem
    summary = run_training(cfg, run_dir, args.workers)
    print(
        f"{summary.run_dir}: {summary.steps}/{cfg.training_steps} steps, {summary.games} games, "
        f"{summary.states} states, {len(summary.checkpoints)} checkpoints"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_key_value_config(args.config, SweepConfig)
    manifest = run_sweep(cfg, args.runs_dir or RUNS_DIR, args.workers)
    completed = manifest.with_status(RunStatus.COMPLETED)
    failed = manifest.with_status(RunStatus.FAILED)
    print(f"{manifest.experiment}: {len(completed)}/{len(manifest.runs)} runs completed, {len(failed)} failed")
    return EXIT_RUNTIME if failed else EXIT_OK


def cmd_tournament(args) -> int:
    cfg = _match_config(args)
    summary = run_tournament(_pool(args.agent, args.run_dir), Schedule(args.schedule), cfg, args.log, args.workers)
    print(f"{summary.log_path}: {summary.played} played, {summary.skipped} skipped, {summary.resumed} resumed")
    return EXIT_OK


def cmd_inference(args) -> int:
    cfg = _match_config(args)
    summary = run_inference_tournament(_pool(args.agent, args.run_dir), args.budgets, cfg, args.log, args.workers)
    print(f"{summary.log_path}: {summary.played} played, {summary.skipped} skipped, {summary.resumed} resumed")
    return EXIT_OK


def cmd_rate(args) -> int:
    matches = load_matches(args.log)
    table = fit_ratings(matches, anchor=args.anchor)
    out = RatingsRepository(args.out).write_all(table.rows())
    for entry in table.rows():
        print(f"{entry.agent_id}\t{entry.elo:.1f}\t±{entry.uncertainty:.1f}\t{entry.games}")
    print(f"{out}: {len(table.entries)} agents rated, anchors {', '.join(table.anchors)}")
    return EXIT_OK


def cmd_fit(args) -> int:
    out_dir = Path(args.out)
    if args.points:
        points = load_agent_points(args.points)
    elif args.ratings:
        ratings_repository = RatingsRepository(args.ratings)
        if not ratings_repository.exists():
            raise MissingInputError(f"Ratings table not found: {args.ratings}")
        points = build_agent_points(ratings_repository.find_all(), args.benchmark)
        out_dir.mkdir(parents=True, exist_ok=True)
        AgentPointRepository(out_dir / "agent_points.csv").write_all(points)
    else:
        raise ConfigError("fit needs --points or --ratings", field="points")

    test_loss = None
    if args.test_loss:
        loss_repository = HeldOutLossRepository(args.test_loss)
        if not loss_repository.exists():
            raise MissingInputError(f"Test-loss table not found: {args.test_loss}")
        test_loss = loss_repository.find_all()

    rng = np.random.default_rng(args.seed) if args.bootstrap else None
    analysis = analyze(points, args.threshold, Aggregation(args.aggregation), rng=rng)
    export_bundle(analysis, points, out_dir, args.threshold, test_loss)
    print(analysis.summary())
    return EXIT_OK


def cmd_testloss(args) -> int:
    rng = np.random.default_rng(args.seed)
    test_set = build_solver_test_set(args.states, rng, min_stones=args.min_stones)
    reports = []
    for path in args.checkpoint:
        params, _ = load_checkpoint(path)
        reports.append(eval_test_loss(params, test_set, agent_id=f"net:{path}"))
    out = HeldOutLossRepository(args.out).write_all(reports)
    print(
        f"{out}: {len(test_set)} states, irreducible policy loss {test_set.irreducible_loss:.4f}, "
        f"{len(reports)} networks evaluated"
    )
    return EXIT_OK


def cmd_solver_bench(args) -> int:
    temperatures = sorted(args.temperatures)
    agents = [f"solver:{SolverAgentConfig(temperature=t).label}" for t in temperatures]
    if args.random:
        agents.append("random")
    cfg = MatchConfig(
        game=GameId.CONNECT_FOUR,
        games_per_pair=args.games_per_pair,
        seed=args.seed,
        opening_plies=args.opening_plies,
    )
    run_tournament(agents, Schedule.ROUND_ROBIN, cfg, args.log, args.workers)
    table = fit_ratings(load_matches(args.log), anchor=args.anchor)
    RatingsRepository(args.out).write_all(table.rows())

    elos = {agent: table.elo(agent) for agent in agents if agent in table.entries}
    missing = [agent for agent in agents if agent not in elos]
    if missing:
        logger.warning(f"No rating for {', '.join(missing)}; every game involving them was skipped")
    solver_elos = [elos.get(agent) for agent in agents[: len(temperatures)]]
    monotone = None not in solver_elos and all(later < earlier for earlier, later in zip(solver_elos, solver_elos[1:]))
    if not monotone and not missing:
        logger.warning("Solver Elo is not strictly decreasing in temperature; play more games per pair")
    print(", ".join(f"{agent}={elo:.1f}" for agent, elo in elos.items()) + f" (monotone: {monotone})")
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================


def _add_match_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--game", type=_game, default=GameId.CONNECT_FOUR, help="connect_four or pentago")
    parser.add_argument("--agent", action="append", help="random, solver:<T>, net:<checkpoint>[@sims=<n>]")
    parser.add_argument("--run-dir", action="append", help="add every checkpoint of a training run")
    parser.add_argument("--games-per-pair", type=int, default=2)
    parser.add_argument("--simulations", type=int, default=300, help="MCTS simulations per move")
    parser.add_argument("--temperature", type=float, default=0.25, help="match temperature (no drop)")
    parser.add_argument("--opening-plies", type=int, default=0, help="random plies before agents take over")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--log", required=True, help="JSON lines match log (appended, resumable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="azlab",
        description="AlphaZero scaling lab: train, match, rate and fit scaling laws",
    )
    parser.add_argument("--workers", type=int, default=WORKERS, help="worker processes (default: all cores)")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser(
        "train",
        help="train one network by self-play",
        description="Train one network by self-play from a key = value run config.",
        epilog=describe_keys(TrainRunConfig),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    train.add_argument("config", help="key = value run config")
    train.add_argument("--run-dir", help=f"run directory (default: {RUNS_DIR}/<config name>)")
    train.set_defaults(handler=cmd_train)

    sweep = sub.add_parser(
        "sweep",
        help="train a grid of widths x seeds",
        description="Train every (width, seed) run of a grid; run config keys apply to all runs.",
        epilog=describe_keys(SweepConfig),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sweep.add_argument("config")
    sweep.add_argument("--runs-dir", help=f"parent of the experiment directory (default: {RUNS_DIR})")
    sweep.set_defaults(handler=cmd_sweep)

    tournament = sub.add_parser("tournament", help="play rated matches between agents")
    _add_match_options(tournament)
    tournament.add_argument("--schedule", choices=[s.value for s in Schedule], default=Schedule.ROUND_ROBIN.value)
    tournament.add_argument("--degree", type=int, default=4, help="opponents per agent for sparse schedules")
    tournament.set_defaults(handler=cmd_tournament)

    inference = sub.add_parser("inference", help="round robins at fixed per-move FLOP budgets")
    _add_match_options(inference)
    inference.add_argument("--budgets", type=_ints, required=True, help="comma separated FLOPs per move")
    inference.set_defaults(handler=cmd_inference)

    rate = sub.add_parser("rate", help="fit Bradley-Terry ratings to a match log")
    rate.add_argument("log")
    rate.add_argument("--out", default="ratings.csv")
    rate.add_argument("--anchor", help="agent fixed at Elo 0 (default: random, else first id)")
    rate.set_defaults(handler=cmd_rate)

    fit = sub.add_parser("fit", help="fit size, compute and optimal-size scaling laws")
    fit.add_argument("--points", help="agent point table (CSV)")
    fit.add_argument("--ratings", help="ratings CSV of network agents")
    fit.add_argument("--benchmark", default="solver:0", help="optimal-play benchmark agent id")
    fit.add_argument("--threshold", type=float, default=PLATEAU_THRESHOLD, help="plateau exclusion, Elo")
    fit.add_argument("--aggregation", choices=[a.value for a in Aggregation], default=Aggregation.MEAN.value)
    fit.add_argument("--test-loss", help="testloss output to carry into the bundle")
    fit.add_argument("--bootstrap", action="store_true", help="bootstrap exponent intervals over seeds")
    fit.add_argument("--seed", type=int, default=0)
    fit.add_argument("--out", default="analysis")
    fit.set_defaults(handler=cmd_fit)

    testloss = sub.add_parser("testloss", help="losses on a solver-annotated Connect Four test set")
    testloss.add_argument("checkpoint", nargs="*")
    testloss.add_argument("--states", type=int, default=10_000)
    testloss.add_argument("--min-stones", type=int, default=0, help="skip positions with fewer stones")
    testloss.add_argument("--seed", type=int, default=0)
    testloss.add_argument("--out", default=TEST_LOSS_TABLE)
    testloss.set_defaults(handler=cmd_testloss)

    bench = sub.add_parser("solver-bench", help="round robin among temperature-softmax solver agents")
    bench.add_argument("--temperatures", type=_floats, default=[0.0, 1.0, math.inf], help="e.g. 0,0.5,1,inf")
    bench.add_argument("--random", action="store_true", help="also enter the uniform-random agent")
    bench.add_argument("--games-per-pair", type=int, default=100)
    bench.add_argument("--opening-plies", type=int, default=30)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--anchor", help="agent fixed at Elo 0")
    bench.add_argument("--log", default="solver_bench.jsonl")
    bench.add_argument("--out", default="solver_bench.csv")
    bench.set_defaults(handler=cmd_solver_bench)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else LOG_LEVEL.upper())
    args.workers = max(1, args.workers)

    try:
        return args.handler(args)
    except LabError as e:
        logger.error(f"{args.command} failed: {e.detail}")
        return e.exit_code
    except Exception:
        logger.exception(f"{args.command} failed unexpectedly")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
