"""Standard algebraic notation.

Two parsing modes share one grammar (docs/san_grammar.ebnf):

* strict: for corpora.  Capture markers, pawn-move shapes, "e.p." markers
  and any present check/mate suffix must agree with the move as played.
  A missing "+"/"#" is tolerated (commonly omitted in the wild); a wrong
  one is rejected.
* lenient: for scoring model output.  Capture markers, suffixes and pawn
  shape quirks are ignored; only the move identity has to be right.

Both modes accept redundant piece disambiguators and the folk spellings
"0-0"/"0-0-0" and trailing "e.p.", none of which are ever emitted.

Rendering emits minimal disambiguation (file, then rank, then full square)
and computes "+"/"#" from the successor status.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from ..errors import (
    AmbiguousTokenError,
    IllegalMoveError,
    NoMatchingLegalMoveError,
    PieceAbsentError,
    UnparseableTokenError,
)
from ..rules import (
    KINGSIDE,
    QUEENSIDE,
    GameState,
    GameStatus,
    Move,
    file_of,
    rank_of,
    square_name,
    validate_state,
)
from ..rules.engine import status_of_position, wrap_move
from ..rules.position import position_from_state
from ..rules.types import FILE_NAMES, RANK_NAMES

_SAN_RE = re.compile(
    r"^(?:"
    r"(?P<castle>O-O-O|O-O)"
    r"|(?:(?P<piece>[KQRBN])?(?P<from_file>[a-h])?(?P<from_rank>[1-8])?"
    r"(?P<capture>x)?(?P<dest>[a-h][1-8])(?:=(?P<promotion>[QRBN]))?)"
    r")"
    r"(?P<ep> ?e\.p\.)?"
    r"(?P<suffix>[+#])?$"
)


@dataclass
class _ParsedToken:
    castle: Optional[str]
    piece: Optional[str]
    from_file: Optional[int]
    from_rank: Optional[int]
    capture: bool
    dest: Optional[int]
    promotion: Optional[str]
    ep_marker: bool
    suffix: Optional[str]


def match_grammar(token: str) -> Optional[_ParsedToken]:
    """Match a token against the SAN grammar; None if it does not fit.

    Exposed for the harness, which needs the geometric reading of tokens
    that turn out not to be legal moves.
    """
    text = token.replace("0-0-0", "O-O-O")
    if "0-0" in text:
        text = text.replace("0-0", "O-O")
    m = _SAN_RE.match(text)
    if not m:
        return None
    castle = None
    if m.group("castle"):
        castle = KINGSIDE if m.group("castle") == "O-O" else QUEENSIDE
    dest = None
    if m.group("dest"):
        d = m.group("dest")
        dest = (int(d[1]) - 1) * 8 + FILE_NAMES.index(d[0])
    return _ParsedToken(
        castle=castle,
        piece=m.group("piece"),
        from_file=FILE_NAMES.index(m.group("from_file")) if m.group("from_file") else None,
        from_rank=RANK_NAMES.index(m.group("from_rank")) if m.group("from_rank") else None,
        capture=bool(m.group("capture")),
        dest=dest,
        promotion=m.group("promotion"),
        ep_marker=bool(m.group("ep")),
        suffix=m.group("suffix"),
    )


def _matches(move: Move, parsed: _ParsedToken) -> bool:
    if parsed.castle is not None:
        return move.castle == parsed.castle
    if move.castle is not None:
        return False
    kind = parsed.piece or "P"
    if move.piece.kind != kind or move.destination != parsed.dest:
        return False
    if parsed.from_file is not None and file_of(move.origin) != parsed.from_file:
        return False
    if parsed.from_rank is not None and rank_of(move.origin) != parsed.from_rank:
        return False
    if move.promotion != parsed.promotion:
        return False
    return True


def _successor_status(state: GameState, move: Move) -> GameStatus:
    from ..rules.engine import encode_move

    pos = position_from_state(state)
    pos.make(encode_move(move))
    return status_of_position(pos)


def parse_san(state: GameState, token: str, strict: bool = True) -> Move:
    """Resolve a SAN token against the legal moves of ``state``.

    Raises UnparseableTokenError, PieceAbsentError, NoMatchingLegalMoveError
    or AmbiguousTokenError; see the module docstring for mode semantics.
    """
    from ..rules import legal_moves

    parsed = match_grammar(token.strip())
    if parsed is None:
        raise UnparseableTokenError(token, f"not a move token: {token!r}")

    moves = legal_moves(state)
    candidates = [m for m in moves if _matches(m, parsed)]

    if not candidates:
        kind = "K" if parsed.castle is not None else (parsed.piece or "P")
        mover = state.side_to_move
        has_kind = any(
            p.kind == kind and p.color == mover for p in state.placement.values()
        )
        if not has_kind:
            raise PieceAbsentError(token, f"{mover} has no {kind} on the board")
        raise NoMatchingLegalMoveError(token, f"no legal move matches {token!r}")
    if len(candidates) > 1:
        raise AmbiguousTokenError(
            token, f"{token!r} matches {len(candidates)} legal moves"
        )
    move = candidates[0]

    if strict:
        if parsed.castle is None:
            if parsed.capture != move.is_capture:
                raise NoMatchingLegalMoveError(token, "capture marker is wrong")
            if parsed.piece is None:
                pawn_shape_ok = (
                    (move.is_capture and parsed.from_file is not None and parsed.from_rank is None)
                    or (not move.is_capture and parsed.from_file is None and parsed.from_rank is None)
                )
                if not pawn_shape_ok:
                    raise NoMatchingLegalMoveError(token, "non-canonical pawn move shape")
        if parsed.ep_marker and not move.is_en_passant:
            raise NoMatchingLegalMoveError(token, "e.p. marker on a plain move")
        if parsed.suffix is not None:
            actual = _successor_status(state, move)
            want = "#" if actual == GameStatus.CHECKMATE else (
                "+" if actual == GameStatus.CHECK else ""
            )
            if parsed.suffix != want:
                raise NoMatchingLegalMoveError(
                    token, f"suffix {parsed.suffix!r} disagrees with successor status"
                )
    return move


def render_san(state: GameState, move: Move) -> str:
    """Canonical SAN for a legal move, with minimal disambiguation."""
    validate_state(state)
    pos = position_from_state(state)
    color = state.side_to_move
    wrapped = [wrap_move(pos, m, color) for m in pos.legal_moves_int()]
    if move not in wrapped:
        raise IllegalMoveError(f"cannot render illegal move: {move}")

    if move.castle is not None:
        body = "O-O" if move.castle == KINGSIDE else "O-O-O"
    elif move.piece.kind == "P":
        body = ""
        if move.is_capture:
            body += FILE_NAMES[file_of(move.origin)] + "x"
        body += square_name(move.destination)
        if move.promotion:
            body += "=" + move.promotion
    else:
        rivals = [
            m
            for m in wrapped
            if m.piece.kind == move.piece.kind
            and m.destination == move.destination
            and m.origin != move.origin
        ]
        body = move.piece.kind
        if rivals:
            same_file = any(file_of(m.origin) == file_of(move.origin) for m in rivals)
            same_rank = any(rank_of(m.origin) == rank_of(move.origin) for m in rivals)
            if not same_file:
                body += FILE_NAMES[file_of(move.origin)]
            elif not same_rank:
                body += RANK_NAMES[rank_of(move.origin)]
            else:
                body += square_name(move.origin)
        if move.is_capture:
            body += "x"
        body += square_name(move.destination)

    after = _successor_status(state, move)
    if after == GameStatus.CHECKMATE:
        body += "#"
    elif after == GameStatus.CHECK:
        body += "+"
    return body


def render_san_all(state: GameState) -> List[str]:
    """SAN for every legal move, in canonical move order."""
    from ..rules import legal_moves

    return [render_san(state, m) for m in legal_moves(state)]
