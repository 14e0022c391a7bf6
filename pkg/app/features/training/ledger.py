"""Compute ledger and optimization cadence"""

from app.features.training.schemas import LedgerEntry


def optimization_cadence(states_arrived: int, data_per_step: int) -> int:
    """Optimization steps due for ``states_arrived`` new states: one per ``data_per_step``"""
    if states_arrived <= 0:
        return 0
    return states_arrived // data_per_step


def training_compute(steps: int, simulations: int, forward_flops: int, data_per_step: int) -> int:
    """C = S * T * F * D in exact integer arithmetic"""
    return steps * simulations * forward_flops * data_per_step


def ledger_entry(
    step: int,
    simulations: int,
    forward_flops: int,
    data_per_step: int,
    states: int,
    games: int,
    evaluations: int,
) -> LedgerEntry:
    # T is the configured maximum even when proven roots stop a search early
    return LedgerEntry(
        step=step,
        S=step,
        T=simulations,
        F=forward_flops,
        D=data_per_step,
        C=training_compute(step, simulations, forward_flops, data_per_step),
        states=states,
        games=games,
        evaluations=evaluations,
    )
