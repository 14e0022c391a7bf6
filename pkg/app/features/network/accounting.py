"""Closed-form parameter and FLOP counts"""

from app.features.network.domain import Architecture


def param_count(arch: Architecture) -> int:
    """N = sum over layers of (fan_in + 1) * fan_out"""
    return sum((fan_in + 1) * fan_out for _, fan_in, fan_out in arch.layers())


def hidden_units(arch: Architecture) -> int:
    # torso_1, torso_2, policy_hidden, value_hidden
    return 4 * arch.width


def forward_flops(arch: Architecture) -> int:
    """
    F = 2 * sum(fan_in * fan_out) + one FLOP per hidden unit.

    With d inputs, width w and A actions this is
    ``2 * (d*w + 3*w*w + w*A + w) + 4*w``.
    """
    matmul = sum(fan_in * fan_out for _, fan_in, fan_out in arch.layers())
    return 2 * matmul + hidden_units(arch)
