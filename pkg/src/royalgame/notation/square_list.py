"""The square-list board notation used in instruction text.

A board renders as comma-plus-space separated square:letter pairs in
ascending square order (rank-major from a1), e.g.

    e1:K, h1:R, e2:P, e8:k

Only occupied squares appear.  The notation is deliberately lossy: it keeps
no side-to-move, castling-rights or en-passant information.  Reconstruction
therefore assumes white to move, grants castling rights exactly where king
and rook still stand on their initial squares, and clears the en-passant
target.  Pairs whose legality depends on the dropped facts are filtered out
upstream when cohorts are built.
"""

from __future__ import annotations

from typing import Dict, Mapping

from ..errors import BadPairSyntaxError, DuplicateSquareError
from ..rules import (
    BLACK,
    WHITE,
    GameState,
    Piece,
    Square,
    parse_square,
    square_name,
    validate_state,
)
from .fen import INITIAL_FEN  # noqa: F401  (re-exported for convenience)

_INITIAL_ANCHORS = (
    ("K", "e1", "h1"),
    ("Q", "e1", "a1"),
    ("k", "e8", "h8"),
    ("q", "e8", "a8"),
)


def render_square_list(state_or_placement) -> str:
    """Render a GameState or bare placement map as square-list text."""
    placement: Mapping[Square, Piece]
    if isinstance(state_or_placement, GameState):
        placement = state_or_placement.placement
    else:
        placement = state_or_placement
    return ", ".join(f"{square_name(sq)}:{placement[sq].letter}" for sq in sorted(placement))


def parse_square_list(text: str, strict: bool = False) -> Dict[Square, Piece]:
    """Parse square-list text into a placement map.

    Lenient mode (the default) accepts any pair order and sloppy spacing
    around commas; strict mode requires the canonical rendering byte for
    byte, which corpus tooling uses to reject reordered or reformatted
    boards.
    """
    placement: Dict[Square, Piece] = {}
    stripped = text.strip()
    if not stripped:
        raise BadPairSyntaxError(text, "empty board text")
    for raw in stripped.split(","):
        token = raw.strip()
        parts = token.split(":")
        if len(parts) != 2:
            raise BadPairSyntaxError(token, f"expected square:piece, got {token!r}")
        sq_text, letter = parts
        try:
            sq = parse_square(sq_text)
            piece = Piece.from_letter(letter)
        except ValueError as exc:
            raise BadPairSyntaxError(token, str(exc)) from None
        if sq in placement:
            raise DuplicateSquareError(token, f"square {sq_text} listed twice")
        placement[sq] = piece
    if strict and render_square_list(placement) != text:
        raise BadPairSyntaxError(text, "not in canonical square-list form")
    return placement


def state_from_square_list(text: str, strict: bool = False) -> GameState:
    """Reconstruct a playable state from square-list text (lossy, see above)."""
    placement = parse_square_list(text, strict=strict)
    rights = set()
    for token, king_sq, rook_sq in _INITIAL_ANCHORS:
        king = placement.get(parse_square(king_sq))
        rook = placement.get(parse_square(rook_sq))
        color = WHITE if token.isupper() else BLACK
        if (
            king is not None
            and rook is not None
            and king.kind == "K"
            and king.color == color
            and rook.kind == "R"
            and rook.color == color
        ):
            rights.add(token)
    state = GameState(
        placement=placement,
        side_to_move=WHITE,
        castling_rights=frozenset(rights),
        en_passant_target=None,
        halfmove_clock=0,
        fullmove_number=1,
    )
    validate_state(state)
    return state
