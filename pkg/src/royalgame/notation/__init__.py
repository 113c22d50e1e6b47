"""Move and board notations: SAN, FEN, square lists."""

from .fen import INITIAL_FEN, parse_fen, render_fen  # noqa: F401
from .san import match_grammar, parse_san, render_san, render_san_all  # noqa: F401
from .square_list import (  # noqa: F401
    parse_square_list,
    render_square_list,
    state_from_square_list,
)
