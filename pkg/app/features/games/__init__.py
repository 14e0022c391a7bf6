"""Game engines feature module"""

from app.features.games.domain import (
    ACTION_COUNT,
    MAX_PLIES,
    OBSERVATION_SIZE,
    GameId,
    GameState,
    Outcome,
    PentagoMove,
    RotationDirection,
    TerminalStatus,
)
from app.features.games.engine import (
    apply_move,
    initial_state,
    legal_mask,
    legal_moves,
    observation,
    position_key,
    random_playout,
    replay,
    terminal_status,
)
from app.features.games.codec import (
    canonical_codec,
    canonical_moves,
    decode_moves,
    decode_position,
    encode_moves,
)

__all__ = [
    "ACTION_COUNT",
    "MAX_PLIES",
    "OBSERVATION_SIZE",
    "GameId",
    "GameState",
    "Outcome",
    "PentagoMove",
    "RotationDirection",
    "TerminalStatus",
    "apply_move",
    "initial_state",
    "legal_mask",
    "legal_moves",
    "observation",
    "position_key",
    "random_playout",
    "replay",
    "terminal_status",
    "canonical_codec",
    "canonical_moves",
    "decode_moves",
    "decode_position",
    "encode_moves",
]
