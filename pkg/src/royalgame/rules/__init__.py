"""Board representation and rules of movement."""

from .engine import (  # noqa: F401
    apply_move,
    legal_moves,
    perft,
    status,
    validate_state,
)
from .types import (  # noqa: F401
    ALL_SQUARES,
    BLACK,
    COLORS,
    FILE_NAMES,
    KINGSIDE,
    PIECE_KINDS,
    PROMOTION_KINDS,
    QUEENSIDE,
    RANK_NAMES,
    WHITE,
    GameState,
    GameStatus,
    Move,
    Piece,
    Square,
    file_of,
    other_color,
    parse_square,
    rank_of,
    square,
    square_name,
)
