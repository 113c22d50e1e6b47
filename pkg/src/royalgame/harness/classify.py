"""Turning raw model text into a move label.

Labels, in the order they are decided:

* unparseable         - no token, or the token does not fit the move grammar
* piece-not-on-board  - the mover has no piece of the named kind at all
* illegal             - well-formed but not a legal move here (ambiguous
                        tokens land here too: the model failed to name one
                        legal move)
* legal / legal-and-check / legal-and-mate - by successor status

piece-not-on-board is checked before illegal: hallucinating a piece is a
different failure from misplaying a real one.  For the two non-legal labels
we also ask what the move was trying to do: the token is applied by brute
geometry (teleporting the named piece, conjuring it for absent pieces) and
the resulting board is scanned for check and mate, giving the would_check /
would_mate flags.  When the destination is not even well-defined the flags
stay False.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from ..errors import (
    AmbiguousTokenError,
    NoMatchingLegalMoveError,
    PieceAbsentError,
    UnparseableTokenError,
)
from ..notation.san import match_grammar, parse_san
from ..rules import (
    BLACK,
    WHITE,
    GameState,
    GameStatus,
    Move,
    Piece,
    file_of,
    parse_square,
    rank_of,
)
from ..rules.position import position_from_state
from ..cohorts import RESPONSE_MARKER

LABEL_LEGAL = "legal"
LABEL_LEGAL_CHECK = "legal-and-check"
LABEL_LEGAL_MATE = "legal-and-mate"
LABEL_ILLEGAL = "illegal"
LABEL_ABSENT = "piece-not-on-board"
LABEL_UNPARSEABLE = "unparseable"

ALL_LABELS = (
    LABEL_LEGAL,
    LABEL_LEGAL_CHECK,
    LABEL_LEGAL_MATE,
    LABEL_ILLEGAL,
    LABEL_ABSENT,
    LABEL_UNPARSEABLE,
)
LEGAL_LABELS = (LABEL_LEGAL, LABEL_LEGAL_CHECK, LABEL_LEGAL_MATE)

_TRAILING_JUNK = ".,;:!?\"'`)]}*"


def extract_move(raw_text: str) -> Optional[str]:
    """First whitespace token after the response marker, tidied up.

    Trailing punctuation is stripped except the meaningful +, # and =X
    tails.  Returns None when there is nothing usable.
    """
    text = raw_text
    if RESPONSE_MARKER in text:
        text = text.split(RESPONSE_MARKER, 1)[1]
    text = text.strip()
    if not text:
        return None
    token = text.split()[0].rstrip(_TRAILING_JUNK)
    return token or None


@dataclass
class Classification:
    label: str
    move: Optional[Move]
    would_check: bool
    would_mate: bool
    token: Optional[str]

    @property
    def is_legal(self) -> bool:
        return self.label in LEGAL_LABELS


def _successor_status(state: GameState, move: Move) -> GameStatus:
    from ..rules.engine import encode_move, status_of_position

    pos = position_from_state(state)
    pos.make(encode_move(move))
    return status_of_position(pos)


def _forced_flags(state: GameState, token: str) -> Tuple[bool, bool]:
    """Apply a non-legal token by brute geometry and scan for check/mate."""
    parsed = match_grammar(token)
    if parsed is None:
        return (False, False)
    mover = state.side_to_move
    placement = dict(state.placement)

    if parsed.castle is not None:
        home_rank = "1" if mover == WHITE else "8"
        king_sq = parse_square("e" + home_rank)
        king = placement.get(king_sq)
        if king is None or king.kind != "K" or king.color != mover:
            return (False, False)
        if parsed.castle == "kingside":
            king_to, rook_from, rook_to = "g", "h", "f"
        else:
            king_to, rook_from, rook_to = "c", "a", "d"
        del placement[king_sq]
        placement[parse_square(king_to + home_rank)] = king
        rook = placement.get(parse_square(rook_from + home_rank))
        if rook is not None and rook.kind == "R" and rook.color == mover:
            del placement[parse_square(rook_from + home_rank)]
            placement[parse_square(rook_to + home_rank)] = rook
    else:
        dest = parsed.dest
        kind = parsed.piece or "P"
        enemy_king = state.king_square("b" if mover == WHITE else "w")
        if dest is None or dest == enemy_king:
            return (False, False)
        candidates = [
            sq
            for sq, piece in placement.items()
            if piece.kind == kind
            and piece.color == mover
            and (parsed.from_file is None or file_of(sq) == parsed.from_file)
            and (parsed.from_rank is None or rank_of(sq) == parsed.from_rank)
            and sq != dest
        ]
        origin = min(candidates) if candidates else None
        if origin is not None:
            del placement[origin]
        placement[dest] = Piece(parsed.promotion or kind, mover)

    ghost = GameState(
        placement=placement,
        side_to_move=BLACK if mover == WHITE else WHITE,
        castling_rights=frozenset(),
        en_passant_target=None,
    )
    pos = position_from_state(ghost)
    mover_white = mover == WHITE
    king = pos.bb[6] & (pos.occ_b if mover_white else pos.occ_w)
    if not king:
        return (False, False)
    king_sq = (king & -king).bit_length() - 1
    checked = bool(pos.attackers(mover_white, king_sq, pos.occ_w | pos.occ_b))
    if not checked:
        return (False, False)
    mate = not pos.legal_moves_int()
    return (True, mate)


def classify(state: GameState, token: Optional[str]) -> Classification:
    """Label a move token against a board (lenient SAN)."""
    if token is None:
        return Classification(LABEL_UNPARSEABLE, None, False, False, None)
    try:
        move = parse_san(state, token, strict=False)
    except UnparseableTokenError:
        return Classification(LABEL_UNPARSEABLE, None, False, False, token)
    except PieceAbsentError:
        check, mate = _forced_flags(state, token)
        return Classification(LABEL_ABSENT, None, check, mate, token)
    except (AmbiguousTokenError, NoMatchingLegalMoveError):
        check, mate = _forced_flags(state, token)
        return Classification(LABEL_ILLEGAL, None, check, mate, token)
    after = _successor_status(state, move)
    if after == GameStatus.CHECKMATE:
        return Classification(LABEL_LEGAL_MATE, move, True, True, token)
    if after == GameStatus.CHECK:
        return Classification(LABEL_LEGAL_CHECK, move, True, False, token)
    return Classification(LABEL_LEGAL, move, False, False, token)


def label_counts(labels) -> Dict[str, int]:
    counts = {label: 0 for label in ALL_LABELS}
    for label in labels:
        counts[label] += 1
    return counts
