"""Full scaling analysis over an agent table, exported as a bundle of CSV tables"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from app.errors import InsufficientDataError
from app.features.scaling.domain import (
    COMPUTE_TABLE,
    CONVERGENCE_TABLE,
    EFFICIENCY_TABLE,
    OPTIMAL_SIZE_TABLE,
    PLATEAU_THRESHOLD,
    REFERENCE_POINTS,
    SIZE_TABLE,
    TEST_LOSS_TABLE,
    Aggregation,
    Axis,
)
from app.features.scaling.efficiency import sample_efficiency_table
from app.features.scaling.fits import (
    bootstrap_exponent,
    exponent_convergence,
    fit_compute_scaling,
    fit_size_scaling,
    on_plateau,
    optimal_size_law,
    pareto_front,
    predicted_elo_gap,
    seed_mean_points,
)
from app.features.scaling.repositories import (
    ComputeRow,
    ComputeScalingRepository,
    ExponentConvergenceRepository,
    HeldOutLossRepository,
    OptimalSizeRepository,
    OptimalSizeRow,
    SampleEfficiencyRepository,
    SizeRow,
    SizeScalingRepository,
)
from app.features.scaling.schemas import (
    AgentPoint,
    BootstrapInterval,
    ExponentSeries,
    LossReport,
    OptimalSizeLaw,
    ParetoFront,
    SampleEfficiency,
    ScalingFit,
)
from app.infra.files.repositories.base import versioned_path

logger = logging.getLogger(__name__)


@dataclass
class ScalingAnalysis:
    size_fit: ScalingFit
    front: ParetoFront
    compute_fit: Optional[ScalingFit] = None
    optimal_size: Optional[OptimalSizeLaw] = None
    efficiency: Optional[SampleEfficiency] = None
    convergence: Optional[ExponentSeries] = None
    intervals: list[BootstrapInterval] = field(default_factory=list)
    files: list[Path] = field(default_factory=list)

    def summary(self) -> str:
        parts = [f"alpha_N = {self.size_fit.exponent:.6f}"]
        if self.compute_fit is not None:
            parts.append(f"alpha_C = {self.compute_fit.exponent:.6f}")
        if self.optimal_size is not None:
            parts.append(f"alpha_C_opt = {self.optimal_size.exponent:.6f}, c0 = {self.optimal_size.c0:.4g}")
        return ", ".join(parts)


def analyze(
    points: list[AgentPoint],
    threshold: float = PLATEAU_THRESHOLD,
    aggregation: Aggregation = Aggregation.MEAN,
    final_step_only: bool = True,
    rng: Optional[np.random.Generator] = None,
) -> ScalingAnalysis:
    """
    Size fit at the last checkpoint of every run, compute fit over the Pareto
    front of all checkpoints, the optimal-size law built from both, sample
    efficiency and the convergence of alpha_N over checkpoints. Parts that
    lack data are left out with a warning; the size fit is required.

    Raises:
        InsufficientDataError: the size fit cannot be made
    """
    final = _final_points(points) if final_step_only else points
    size_fit = fit_size_scaling(final, threshold, aggregation)

    front_input = seed_mean_points(points) if aggregation is Aggregation.MEAN else points
    front = pareto_front(front_input)
    analysis = ScalingAnalysis(size_fit=size_fit, front=front)

    try:
        analysis.compute_fit = fit_compute_scaling(front, threshold)
        analysis.optimal_size = optimal_size_law(size_fit, analysis.compute_fit, front)
    except InsufficientDataError as e:
        logger.warning(f"No compute fit: {e.detail}")

    analysis.efficiency = sample_efficiency_table(points)
    analysis.convergence = exponent_convergence(points, threshold, aggregation)

    if rng is not None:
        for axis in (Axis.PARAMS, Axis.COMPUTE):
            try:
                sample = final if axis is Axis.PARAMS else points
                analysis.intervals.append(bootstrap_exponent(sample, axis, rng, threshold=threshold))
            except InsufficientDataError as e:
                logger.warning(f"No bootstrap interval for alpha_{axis.value}: {e.detail}")

    logger.info(f"Scaling analysis: {analysis.summary()}")
    return analysis


def _final_points(points: list[AgentPoint]) -> list[AgentPoint]:
    """Last checkpoint of every (width, seed) run"""
    last: dict[tuple[int, int], AgentPoint] = {}
    for p in points:
        key = (p.width, p.seed)
        if key not in last or p.step > last[key].step:
            last[key] = p
    return list(last.values())


def export_bundle(
    analysis: ScalingAnalysis,
    points: list[AgentPoint],
    out_dir: str | Path,
    threshold: float = PLATEAU_THRESHOLD,
    test_loss: Optional[list[LossReport]] = None,
) -> list[Path]:
    """
    Write the analysis tables; existing files get a versioned sibling.
    The held-out loss table is written when network loss reports are given.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []

    final_ids = {p.agent_id for p in _final_points(points)}
    size_rows = [
        SizeRow(
            agent_id=p.agent_id,
            width=p.width,
            seed=p.seed,
            step=p.step,
            params=p.params,
            elo=p.elo,
            excluded=on_plateau(p, threshold),
            fitted_elo=analysis.size_fit.predict(p.params),
        )
        for p in sorted(points, key=lambda p: (p.params, p.seed))
        if p.agent_id in final_ids
    ]
    files.append(SizeScalingRepository(out_dir / SIZE_TABLE).write_all(size_rows))

    front_ids = set(analysis.front.ids)
    compute_source = analysis.front.members + [p for p in points if p.agent_id not in front_ids]
    compute_rows = [
        ComputeRow(
            agent_id=p.agent_id,
            width=p.width,
            seed=p.seed,
            step=p.step,
            compute=p.compute,
            elo=p.elo,
            on_front=p.agent_id in front_ids,
            excluded=on_plateau(p, threshold),
            fitted_elo=analysis.compute_fit.predict(p.compute) if analysis.compute_fit else None,
        )
        for p in sorted(compute_source, key=lambda p: (p.compute, p.agent_id))
    ]
    files.append(ComputeScalingRepository(out_dir / COMPUTE_TABLE).write_all(compute_rows))

    if analysis.optimal_size is not None:
        law = analysis.optimal_size
        members = set(law.members)
        optimal_rows = [
            OptimalSizeRow(
                agent_id=p.agent_id,
                compute=p.compute,
                params=p.params,
                optimal_params=law.optimal_params(p.compute),
            )
            for p in analysis.front.members
            if p.agent_id in members
        ]
        files.append(OptimalSizeRepository(out_dir / OPTIMAL_SIZE_TABLE).write_all(optimal_rows))

    if analysis.efficiency is not None:
        files.append(
            SampleEfficiencyRepository(out_dir / EFFICIENCY_TABLE).write_all(analysis.efficiency.curves)
        )
    if analysis.convergence is not None:
        files.append(
            ExponentConvergenceRepository(out_dir / CONVERGENCE_TABLE).write_all(analysis.convergence.rows)
        )
    if test_loss:
        files.append(HeldOutLossRepository(out_dir / TEST_LOSS_TABLE).write_all(test_loss))

    files.append(_write_json(out_dir / "fits.json", _fits_document(analysis)))
    files.append(write_reference_points(out_dir))
    analysis.files = files
    logger.info(f"Wrote {len(files)} analysis files to {out_dir}")
    return files


def _fits_document(analysis: ScalingAnalysis) -> dict:
    return {
        "size": analysis.size_fit.model_dump(mode="json"),
        "compute": analysis.compute_fit.model_dump(mode="json") if analysis.compute_fit else None,
        "elo_per_doubling": {
            "params": predicted_elo_gap(analysis.size_fit, 2.0, 1.0),
            "compute": predicted_elo_gap(analysis.compute_fit, 2.0, 1.0) if analysis.compute_fit else None,
        },
        "optimal_size": analysis.optimal_size.model_dump(mode="json") if analysis.optimal_size else None,
        "front": analysis.front.ids,
        "larger_more_efficient": analysis.efficiency.larger_more_efficient if analysis.efficiency else None,
        "front_data": [row.model_dump() for row in analysis.efficiency.front_data] if analysis.efficiency else [],
        "intervals": [interval.model_dump(mode="json") for interval in analysis.intervals],
    }


def write_reference_points(out_dir: str | Path) -> Path:
    """Literature estimates of published agents, for placing desk-scale fits in context"""
    document = {
        "note": "Approximate literature values, not produced by this lab",
        "agents": REFERENCE_POINTS,
    }
    return _write_json(Path(out_dir) / "reference_points.json", document)


def _write_json(path: Path, document: dict) -> Path:
    path = versioned_path(path)
    path.write_text(json.dumps(document, indent=2, sort_keys=True))
    return path
