"""Core value types: squares, pieces, moves, game states.

Squares are plain ints 0..63 in rank-major order (a1=0, b1=1, ..., h8=63),
which makes the natural int order the canonical board order used everywhere
(square lists, move sorting).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, Mapping, NamedTuple, Optional

from ..errors import InvalidStateError

Square = int

FILE_NAMES = "abcdefgh"
RANK_NAMES = "12345678"

WHITE = "w"
BLACK = "b"
COLORS = (WHITE, BLACK)

PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING = "P", "N", "B", "R", "Q", "K"
PIECE_KINDS = (PAWN, KNIGHT, BISHOP, ROOK, QUEEN, KING)
PROMOTION_KINDS = (KNIGHT, BISHOP, ROOK, QUEEN)  # canonical expansion order

KINGSIDE = "kingside"
QUEENSIDE = "queenside"

ALL_SQUARES = range(64)


def square(file_index: int, rank_index: int) -> Square:
    return rank_index * 8 + file_index


def file_of(sq: Square) -> int:
    return sq & 7


def rank_of(sq: Square) -> int:
    return sq >> 3


def square_name(sq: Square) -> str:
    return FILE_NAMES[sq & 7] + RANK_NAMES[sq >> 3]


def parse_square(name: str) -> Square:
    if len(name) == 2 and name[0] in FILE_NAMES and name[1] in RANK_NAMES:
        return square(FILE_NAMES.index(name[0]), RANK_NAMES.index(name[1]))
    raise ValueError(f"not a square name: {name!r}")


def other_color(color: str) -> str:
    return BLACK if color == WHITE else WHITE


class Piece(NamedTuple):
    kind: str  # one of PIECE_KINDS
    color: str  # WHITE or BLACK

    @property
    def letter(self) -> str:
        """FEN letter: uppercase for white, lowercase for black."""
        return self.kind if self.color == WHITE else self.kind.lower()

    @classmethod
    def from_letter(cls, letter: str) -> "Piece":
        upper = letter.upper()
        if upper not in PIECE_KINDS:
            raise ValueError(f"not a piece letter: {letter!r}")
        return cls(upper, WHITE if letter.isupper() else BLACK)


class GameStatus(Enum):
    ONGOING = "ongoing"
    CHECK = "check"
    CHECKMATE = "checkmate"
    STALEMATE = "stalemate"
    DRAW_INSUFFICIENT_MATERIAL = "draw-insufficient-material"


@dataclass(frozen=True)
class Move:
    """A single move, fully determined against a position.

    ``promotion`` is one of PROMOTION_KINDS or None; ``castle`` is KINGSIDE,
    QUEENSIDE or None (castling moves carry the king's origin/destination).
    """

    origin: Square
    destination: Square
    piece: Piece
    is_capture: bool = False
    promotion: Optional[str] = None
    castle: Optional[str] = None
    is_en_passant: bool = False

    def __post_init__(self):
        if self.promotion is not None:
            if self.piece.kind != PAWN or self.promotion not in PROMOTION_KINDS:
                raise ValueError(f"bad promotion: {self}")
        if self.castle is not None and self.piece.kind != KING:
            raise ValueError(f"castle flag on non-king move: {self}")
        if self.is_en_passant and self.piece.kind != PAWN:
            raise ValueError(f"en passant flag on non-pawn move: {self}")

    def sort_key(self) -> tuple:
        promo_rank = PROMOTION_KINDS.index(self.promotion) if self.promotion else -1
        return (self.origin, self.destination, promo_rank)


def _initial_placement() -> Dict[Square, Piece]:
    placement: Dict[Square, Piece] = {}
    back = (ROOK, KNIGHT, BISHOP, QUEEN, KING, BISHOP, KNIGHT, ROOK)
    for f, kind in enumerate(back):
        placement[square(f, 0)] = Piece(kind, WHITE)
        placement[square(f, 7)] = Piece(kind, BLACK)
    for f in range(8):
        placement[square(f, 1)] = Piece(PAWN, WHITE)
        placement[square(f, 6)] = Piece(PAWN, BLACK)
    return placement


# Castling right tokens use FEN letters: K/Q white, k/q black.
ALL_CASTLING = frozenset("KQkq")

_CASTLING_ANCHORS = {
    "K": ((parse_square("e1"), Piece(KING, WHITE)), (parse_square("h1"), Piece(ROOK, WHITE))),
    "Q": ((parse_square("e1"), Piece(KING, WHITE)), (parse_square("a1"), Piece(ROOK, WHITE))),
    "k": ((parse_square("e8"), Piece(KING, BLACK)), (parse_square("h8"), Piece(ROOK, BLACK))),
    "q": ((parse_square("e8"), Piece(KING, BLACK)), (parse_square("a8"), Piece(ROOK, BLACK))),
}


@dataclass(frozen=True)
class GameState:
    """Immutable full position: placement plus side to move and bookkeeping.

    ``placement`` maps square -> Piece for occupied squares only.  Treat it as
    read-only; all operations here return fresh states.
    """

    placement: Mapping[Square, Piece]
    side_to_move: str = WHITE
    castling_rights: frozenset = frozenset(ALL_CASTLING)
    en_passant_target: Optional[Square] = None
    halfmove_clock: int = 0
    fullmove_number: int = 1

    @classmethod
    def initial(cls) -> "GameState":
        return cls(placement=_initial_placement())

    def piece_at(self, sq: Square) -> Optional[Piece]:
        return self.placement.get(sq)

    def king_square(self, color: str) -> Optional[Square]:
        for sq, piece in self.placement.items():
            if piece.kind == KING and piece.color == color:
                return sq
        return None

    def pieces(self, color: Optional[str] = None) -> Iterator[tuple]:
        for sq in sorted(self.placement):
            piece = self.placement[sq]
            if color is None or piece.color == color:
                yield sq, piece


def validate_structure(state: GameState) -> None:
    """Check every invariant that does not require attack computation.

    Raises InvalidStateError naming the first broken invariant.  The
    side-not-to-move-in-check invariant is enforced by validate_state in the
    engine module, which owns attack logic.
    """
    kings = {WHITE: 0, BLACK: 0}
    for sq, piece in state.placement.items():
        if not isinstance(sq, int) or not 0 <= sq <= 63:
            raise InvalidStateError("square-out-of-range", repr(sq))
        if piece.kind not in PIECE_KINDS or piece.color not in COLORS:
            raise InvalidStateError("unknown-piece", repr(piece))
        if piece.kind == KING:
            kings[piece.color] += 1
        if piece.kind == PAWN and rank_of(sq) in (0, 7):
            raise InvalidStateError("pawn-on-back-rank", square_name(sq))
    for color, n in kings.items():
        if n != 1:
            raise InvalidStateError("one-king-per-color", f"{color} has {n}")
    if state.side_to_move not in COLORS:
        raise InvalidStateError("bad-side-to-move", repr(state.side_to_move))
    if not state.castling_rights <= ALL_CASTLING:
        raise InvalidStateError("bad-castling-rights", repr(state.castling_rights))
    for token in state.castling_rights:
        for anchor_sq, anchor_piece in _CASTLING_ANCHORS[token]:
            if state.placement.get(anchor_sq) != anchor_piece:
                raise InvalidStateError(
                    "castling-rights-placement",
                    f"right {token} but {anchor_piece.letter} not on {square_name(anchor_sq)}",
                )
    ep = state.en_passant_target
    if ep is not None:
        if not 0 <= ep <= 63:
            raise InvalidStateError("en-passant-rank", repr(ep))
        want_rank = 5 if state.side_to_move == WHITE else 2
        if rank_of(ep) != want_rank:
            raise InvalidStateError("en-passant-rank", square_name(ep))
        if ep in state.placement:
            raise InvalidStateError("en-passant-occupied", square_name(ep))
    if state.halfmove_clock < 0:
        raise InvalidStateError("negative-halfmove-clock", str(state.halfmove_clock))
    if state.fullmove_number < 1:
        raise InvalidStateError("fullmove-number", str(state.fullmove_number))
