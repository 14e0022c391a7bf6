"""Sample efficiency: Elo against generated states, per width"""
import logging
from collections import defaultdict
from typing import Iterable

import numpy as np
from scipy.stats import gmean

from app.features.scaling.fits import pareto_front
from app.features.scaling.schemas import AgentPoint, EfficiencyRow, FrontDataRow, SampleEfficiency

logger = logging.getLogger(__name__)


def geometric_mean(values: Iterable[float]) -> float:
    return float(gmean(np.asarray(list(values), dtype=float)))


def efficiency_curves(points: Iterable[AgentPoint]) -> list[EfficiencyRow]:
    """Per (width, step): geometric-mean states and mean Elo over seeds"""
    groups: dict[tuple[int, int], list[AgentPoint]] = defaultdict(list)
    for p in points:
        groups[(p.width, p.step)].append(p)
    return [
        EfficiencyRow(
            width=width,
            step=step,
            states=geometric_mean(max(m.states, 1) for m in members),
            elo=float(np.mean([m.elo for m in members])),
            seeds=len({m.seed for m in members}),
        )
        for (width, step), members in sorted(groups.items())
    ]


def _larger_more_efficient(curves: list[EfficiencyRow]) -> bool:
    """Compare widths at the steps they share; consecutive widths must strictly gain Elo"""
    by_step: dict[int, list[EfficiencyRow]] = defaultdict(list)
    for row in curves:
        by_step[row.step].append(row)
    compared = False
    for rows in by_step.values():
        if len(rows) < 2:
            continue
        compared = True
        elos = [row.elo for row in sorted(rows, key=lambda r: r.width)]
        if any(later <= earlier for earlier, later in zip(elos, elos[1:])):
            return False
    return compared


def sample_efficiency_table(points: Iterable[AgentPoint]) -> SampleEfficiency:
    """
    Learning curves keyed by generated states, plus the data used by each
    width's agents on the compute Pareto front (geometric mean over agents).
    """
    points = list(points)
    curves = efficiency_curves(points)

    front_data = []
    if points:
        front = pareto_front(points)
        by_width: dict[int, list[AgentPoint]] = defaultdict(list)
        for member in front.members:
            by_width[member.width].append(member)
        front_data = [
            FrontDataRow(
                width=width,
                agents=len(members),
                states_geomean=geometric_mean(max(m.states, 1) for m in members),
            )
            for width, members in sorted(by_width.items())
        ]

    ordered = _larger_more_efficient(curves)
    logger.info(f"Sample efficiency: {len(curves)} curve points, larger widths more efficient: {ordered}")
    return SampleEfficiency(curves=curves, front_data=front_data, larger_more_efficient=ordered)
