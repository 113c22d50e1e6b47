"""royalgame: chess rules oracle, notation tooling, cohort builder and eval harness."""

__version__ = "0.1.0"

# Version of the NDJSON request/response protocol spoken between the eval
# harness and move-proposal endpoints (baselines, model bridges).
PROTOCOL_VERSION = "1"

from .rules import (  # noqa: F401
    GameState,
    GameStatus,
    Move,
    Piece,
    apply_move,
    legal_moves,
    perft,
    status,
    validate_state,
)
