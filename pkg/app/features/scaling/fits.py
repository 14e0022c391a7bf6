"""
Power-law fits of Elo against model size and training compute.

A power law in strength, gamma ~ x ** alpha, is a straight line in Elo
against log10(x) with slope 400 * alpha.
"""
import logging
from collections import defaultdict
from typing import Iterable

import numpy as np
from scipy import stats

from app.errors import InsufficientDataError
from app.features.scaling.domain import (
    BOOTSTRAP_SAMPLES,
    MIN_FIT_POINTS,
    PLATEAU_THRESHOLD,
    Aggregation,
    Axis,
    exponent_from_slope,
)
from app.features.scaling.schemas import (
    AgentPoint,
    BootstrapInterval,
    ConvergenceRow,
    ExponentSeries,
    OptimalSizeLaw,
    ParetoFront,
    ScalingFit,
)

logger = logging.getLogger(__name__)


def expected_score_from_resources(x_i: float, x_j: float, alpha: float) -> float:
    """Expected score of an agent with resource ``x_i`` against one with ``x_j``"""
    if x_i <= 0 or x_j <= 0:
        raise ValueError("resources must be positive")
    return 1.0 / (1.0 + (x_j / x_i) ** alpha)


def on_plateau(point: AgentPoint, threshold: float = PLATEAU_THRESHOLD) -> bool:
    return point.solver_gap is not None and point.solver_gap < threshold


def _fit_line(axis: Axis, xs: np.ndarray, ys: np.ndarray, excluded: list[str], aggregation: Aggregation) -> ScalingFit:
    """
    Raises:
        InsufficientDataError: fewer than three distinct abscissae
    """
    distinct = len(np.unique(xs))
    if distinct < MIN_FIT_POINTS:
        logger.error(f"{axis.value} fit needs {MIN_FIT_POINTS} distinct points, got {distinct}")
        raise InsufficientDataError(
            f"{axis.value} fit needs at least {MIN_FIT_POINTS} distinct points after exclusion, got {distinct}"
        )

    log_x = np.log10(xs)
    result = stats.linregress(log_x, ys)
    residuals = ys - (result.slope * log_x + result.intercept)
    # constant Elo gives an undefined correlation
    pearson = float(result.rvalue) if np.isfinite(result.rvalue) else 0.0
    return ScalingFit(
        axis=axis,
        slope=float(result.slope),
        exponent=exponent_from_slope(float(result.slope)),
        intercept=float(result.intercept),
        points=len(xs),
        excluded=excluded,
        residual_rms=float(np.sqrt(np.mean(residuals**2))),
        max_residual=float(np.max(np.abs(residuals))),
        pearson_r=pearson,
        stderr=float(result.stderr),
        aggregation=aggregation,
    )


def _aggregate(points: list[AgentPoint], axis: Axis, aggregation: Aggregation) -> tuple[np.ndarray, np.ndarray]:
    if aggregation is Aggregation.AGENTS:
        return (
            np.array([p.resource(axis) for p in points], dtype=float),
            np.array([p.elo for p in points], dtype=float),
        )
    groups: dict[float, list[float]] = defaultdict(list)
    for p in points:
        groups[p.resource(axis)].append(p.elo)
    xs = sorted(groups)
    return np.array(xs, dtype=float), np.array([np.mean(groups[x]) for x in xs])


def fit_size_scaling(
    points: Iterable[AgentPoint],
    threshold: float = PLATEAU_THRESHOLD,
    aggregation: Aggregation = Aggregation.MEAN,
) -> ScalingFit:
    """
    Fit Elo against log10 of the parameter count.

    Points within ``threshold`` Elo of the optimal-play benchmark are
    excluded; the rest are aggregated per size (``mean``) or used as is.

    Raises:
        InsufficientDataError: fewer than three sizes remain
    """
    points = list(points)
    excluded = sorted(p.agent_id for p in points if on_plateau(p, threshold))
    usable = [p for p in points if not on_plateau(p, threshold)]
    if excluded:
        logger.info(f"Size fit: {len(excluded)} plateau points excluded")
    xs, ys = _aggregate(usable, Axis.PARAMS, aggregation)
    fit = _fit_line(Axis.PARAMS, xs, ys, excluded, aggregation)
    logger.info(f"Size fit: alpha_N = {fit.exponent:.4f} (slope {fit.slope:.1f}, r = {fit.pearson_r:.3f})")
    return fit


def seed_mean_points(points: Iterable[AgentPoint]) -> list[AgentPoint]:
    """
    Average Elo, compute and data over seeds for each (width, step).

    The averaged points carry ``seed = -1``.
    """
    groups: dict[tuple[int, int], list[AgentPoint]] = defaultdict(list)
    for p in points:
        groups[(p.width, p.step)].append(p)

    averaged = []
    for (width, step), members in sorted(groups.items()):
        gaps = [m.solver_gap for m in members if m.solver_gap is not None]
        averaged.append(
            AgentPoint(
                agent_id=f"w{width}-s{step}-mean",
                game=members[0].game,
                width=width,
                seed=-1,
                step=step,
                params=members[0].params,
                compute=float(np.mean([m.compute for m in members])),
                states=int(round(np.mean([m.states for m in members]))),
                elo=float(np.mean([m.elo for m in members])),
                solver_gap=float(np.mean(gaps)) if gaps else None,
            )
        )
    return averaged


def pareto_front(points: Iterable[AgentPoint]) -> ParetoFront:
    """
    Agents with the highest Elo among all agents of equal or lower compute,
    ordered by compute. Ties on compute keep the strongest agent (then the
    smallest id).

    Raises:
        InsufficientDataError: no points
    """
    ordered = sorted(points, key=lambda p: (p.compute, -p.elo, p.agent_id))
    if not ordered:
        raise InsufficientDataError("Pareto front of an empty point set")

    members: list[AgentPoint] = []
    best = -np.inf
    for point in ordered:
        if members and point.compute == members[-1].compute:
            continue
        if point.elo > best:
            members.append(point)
            best = point.elo
    return ParetoFront(members=members)


def fit_compute_scaling(
    front: ParetoFront,
    threshold: float = PLATEAU_THRESHOLD,
) -> ScalingFit:
    """
    Fit Elo against log10 of training compute over the Pareto front, leaving
    out members on the optimal-play plateau. Seed averaging is done by
    building the front from ``seed_mean_points``.

    Raises:
        InsufficientDataError: fewer than three usable front members
    """
    members = sorted(front.members, key=lambda p: p.compute)
    excluded = sorted(p.agent_id for p in members if on_plateau(p, threshold))
    usable = [p for p in members if not on_plateau(p, threshold)]
    aggregation = Aggregation.MEAN if usable and all(p.seed == -1 for p in usable) else Aggregation.AGENTS
    xs = np.array([p.compute for p in usable], dtype=float)
    ys = np.array([p.elo for p in usable], dtype=float)
    fit = _fit_line(Axis.COMPUTE, xs, ys, excluded, aggregation)
    logger.info(f"Compute fit: alpha_C = {fit.exponent:.4f} over {fit.points} front members")
    return fit


def optimal_size_law(fit_n: ScalingFit, fit_c: ScalingFit, front: ParetoFront) -> OptimalSizeLaw:
    """
    Compute-optimal size N_opt(C) = (C / c0) ** (alpha_C / alpha_N).

    The exponent is fixed by the two fits; only ``c0`` is fitted, by least
    squares of log N against log C over the front members used by ``fit_c``.

    Raises:
        InsufficientDataError: alpha_N is zero or no front members remain
    """
    if fit_n.exponent == 0:
        logger.error("Optimal size law is undefined for alpha_N = 0")
        raise InsufficientDataError("alpha_N is zero; the optimal-size exponent is undefined")
    exponent = fit_c.exponent / fit_n.exponent

    excluded = set(fit_c.excluded)
    members = [p for p in front.members if p.agent_id not in excluded]
    if not members:
        raise InsufficientDataError("No front members left to fit c0")

    log_c = np.log10([p.compute for p in members])
    log_n = np.log10([float(p.params) for p in members])
    log_c0 = float(np.mean(log_c - log_n / exponent))
    law = OptimalSizeLaw(
        exponent=exponent,
        c0=10.0**log_c0,
        alpha_n=fit_n.exponent,
        alpha_c=fit_c.exponent,
        members=[p.agent_id for p in members],
    )
    logger.info(f"Optimal size: exponent {law.exponent:.4f}, c0 = {law.c0:.4g}")
    return law


def exponent_convergence(
    points: Iterable[AgentPoint],
    threshold: float = PLATEAU_THRESHOLD,
    aggregation: Aggregation = Aggregation.MEAN,
) -> ExponentSeries:
    """Size-scaling exponent fitted separately at every checkpoint step"""
    by_step: dict[int, list[AgentPoint]] = defaultdict(list)
    for p in points:
        by_step[p.step].append(p)

    rows = []
    for step in sorted(by_step):
        try:
            fit = fit_size_scaling(by_step[step], threshold, aggregation)
        except InsufficientDataError as e:
            logger.warning(f"No size fit at step {step}: {e.detail}")
            continue
        rows.append(
            ConvergenceRow(step=step, slope=fit.slope, exponent=fit.exponent, pearson_r=fit.pearson_r, points=fit.points)
        )

    exponents = np.array([row.exponent for row in rows])
    diffs = np.diff(exponents)
    return ExponentSeries(
        rows=rows,
        increasing=bool(len(rows) > 1 and np.all(diffs > 0)),
        non_decreasing=bool(np.all(diffs >= -1e-12)),
    )


def bootstrap_exponent(
    points: Iterable[AgentPoint],
    axis: Axis,
    rng: np.random.Generator,
    samples: int = BOOTSTRAP_SAMPLES,
    confidence: float = 0.95,
    threshold: float = PLATEAU_THRESHOLD,
) -> BootstrapInterval:
    """
    Percentile interval for alpha from resampling seeds with replacement.

    Raises:
        InsufficientDataError: fewer than two seeds, or no resample could be fitted
    """
    points = list(points)
    seeds = sorted({p.seed for p in points})
    if len(seeds) < 2:
        raise InsufficientDataError(f"Bootstrapping over seeds needs at least two seeds, got {len(seeds)}")
    by_seed = {seed: [p for p in points if p.seed == seed] for seed in seeds}

    def fit(sample: list[AgentPoint]) -> float:
        if axis is Axis.PARAMS:
            return fit_size_scaling(sample, threshold).exponent
        return fit_compute_scaling(pareto_front(seed_mean_points(sample)), threshold).exponent

    estimate = fit(points)
    exponents = []
    for _ in range(samples):
        chosen = rng.choice(seeds, size=len(seeds), replace=True)
        sample = [
            p.model_copy(update={"seed": draw}) for draw, seed in enumerate(chosen) for p in by_seed[int(seed)]
        ]
        try:
            exponents.append(fit(sample))
        except InsufficientDataError:
            continue
    if not exponents:
        raise InsufficientDataError("No bootstrap resample could be fitted")

    tail = 100.0 * (1.0 - confidence) / 2.0
    low, high = np.percentile(exponents, [tail, 100.0 - tail])
    return BootstrapInterval(
        axis=axis,
        estimate=estimate,
        low=float(low),
        high=float(high),
        confidence=confidence,
        samples=len(exponents),
    )


def predicted_elo_gap(fit: ScalingFit, x_i: float, x_j: float) -> float:
    """Elo difference the fitted line predicts between resources ``x_i`` and ``x_j``"""
    return fit.predict(x_i) - fit.predict(x_j)


