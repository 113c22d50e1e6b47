"""FEN parsing and rendering.

parse_fen and render_fen are mutual inverses on canonical text.  Syntax
problems raise MalformedFenError; a well-formed FEN describing an impossible
position raises InvalidStateError naming the broken invariant.
"""

from __future__ import annotations

from typing import Dict

from ..errors import MalformedFenError
from ..rules import (
    BLACK,
    WHITE,
    GameState,
    Piece,
    Square,
    parse_square,
    square,
    square_name,
    validate_state,
)

INITIAL_FEN = "rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1"

_CASTLING_ORDER = "KQkq"


def parse_placement_field(field: str) -> Dict[Square, Piece]:
    ranks = field.split("/")
    if len(ranks) != 8:
        raise MalformedFenError(field, f"expected 8 ranks, got {len(ranks)}")
    placement: Dict[Square, Piece] = {}
    for rank_index, row in enumerate(ranks):
        r = 7 - rank_index  # FEN lists rank 8 first
        f = 0
        prev_digit = False
        for ch in row:
            if ch.isdigit():
                if ch == "0" or ch == "9" or prev_digit:
                    raise MalformedFenError(field, f"bad skip count in rank {r + 1}")
                prev_digit = True
                f += int(ch)
            else:
                prev_digit = False
                try:
                    piece = Piece.from_letter(ch)
                except ValueError:
                    raise MalformedFenError(field, f"bad piece letter {ch!r}") from None
                if f > 7:
                    raise MalformedFenError(field, f"rank {r + 1} overflows")
                placement[square(f, r)] = piece
                f += 1
        if f != 8:
            raise MalformedFenError(field, f"rank {r + 1} sums to {f}, expected 8")
    return placement


def parse_fen(text: str) -> GameState:
    fields = text.split()
    if len(fields) != 6:
        raise MalformedFenError(text, f"expected 6 fields, got {len(fields)}")
    placement_field, side, castling, ep, halfmove, fullmove = fields

    placement = parse_placement_field(placement_field)

    if side not in (WHITE, BLACK):
        raise MalformedFenError(text, f"bad side to move {side!r}")

    if castling == "-":
        rights = frozenset()
    else:
        seen = set()
        for ch in castling:
            if ch not in _CASTLING_ORDER or ch in seen:
                raise MalformedFenError(text, f"bad castling field {castling!r}")
            seen.add(ch)
        rights = frozenset(seen)

    if ep == "-":
        ep_square = None
    else:
        try:
            ep_square = parse_square(ep)
        except ValueError:
            raise MalformedFenError(text, f"bad en passant field {ep!r}") from None

    try:
        halfmove_clock = int(halfmove)
        fullmove_number = int(fullmove)
    except ValueError:
        raise MalformedFenError(text, "clocks must be integers") from None

    state = GameState(
        placement=placement,
        side_to_move=side,
        castling_rights=rights,
        en_passant_target=ep_square,
        halfmove_clock=halfmove_clock,
        fullmove_number=fullmove_number,
    )
    validate_state(state)
    return state


def render_placement_field(state: GameState) -> str:
    rows = []
    for r in range(7, -1, -1):
        row = []
        empty = 0
        for f in range(8):
            piece = state.placement.get(square(f, r))
            if piece is None:
                empty += 1
            else:
                if empty:
                    row.append(str(empty))
                    empty = 0
                row.append(piece.letter)
        if empty:
            row.append(str(empty))
        rows.append("".join(row))
    return "/".join(rows)


def render_fen(state: GameState) -> str:
    castling = "".join(ch for ch in _CASTLING_ORDER if ch in state.castling_rights) or "-"
    ep = square_name(state.en_passant_target) if state.en_passant_target is not None else "-"
    return " ".join(
        (
            render_placement_field(state),
            state.side_to_move,
            castling,
            ep,
            str(state.halfmove_clock),
            str(state.fullmove_number),
        )
    )
