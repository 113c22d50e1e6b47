"""Public rules operations: legal_moves, apply_move, status, perft.

GameState in, GameState out; nothing here mutates its inputs.  Heavy lifting
happens on the internal bitboard position.
"""

from __future__ import annotations

import time
from typing import List

from ..errors import IllegalMoveError, InvalidStateError
from .position import (
    CASTLE_FLAG,
    EP_FLAG,
    KIND_OF_CODE,
    _Position,
    position_from_state,
    state_from_position,
)
from .tables import bit, lsb
from .types import (
    BLACK,
    KINGSIDE,
    QUEENSIDE,
    WHITE,
    GameState,
    GameStatus,
    Move,
    Piece,
    validate_structure,
)


def validate_state(state: GameState) -> None:
    """Raise InvalidStateError naming the first broken invariant, if any."""
    validate_structure(state)
    pos = position_from_state(state)
    mover_is_white = state.side_to_move == WHITE
    idle_king = pos.king_sq(not mover_is_white)
    if pos.attackers(mover_is_white, idle_king, pos.occ_w | pos.occ_b):
        raise InvalidStateError("side-not-to-move-in-check")


def wrap_move(pos: _Position, m: int, color: str) -> Move:
    """Turn an internal int move (pre-make) into the public Move value."""
    frm = m & 63
    to = (m >> 6) & 63
    promo = (m >> 12) & 7
    kind = KIND_OF_CODE[pos.piece_type_at(frm)]
    is_ep = bool(m & EP_FLAG)
    castle = None
    if m & CASTLE_FLAG:
        castle = KINGSIDE if (to & 7) == 6 else QUEENSIDE
    enemy_occ = pos.occ_b if color == WHITE else pos.occ_w
    return Move(
        origin=frm,
        destination=to,
        piece=Piece(kind, color),
        is_capture=is_ep or bool(enemy_occ & bit(to)),
        promotion=KIND_OF_CODE[promo] if promo else None,
        castle=castle,
        is_en_passant=is_ep,
    )


def encode_move(move: Move) -> int:
    from .position import CODE_OF_KIND

    m = move.origin | move.destination << 6
    if move.promotion:
        m |= CODE_OF_KIND[move.promotion] << 12
    if move.is_en_passant:
        m |= EP_FLAG
    if move.castle:
        m |= CASTLE_FLAG
    return m


def legal_moves(state: GameState) -> List[Move]:
    """All legal moves, sorted by (origin, destination, promotion kind)."""
    validate_state(state)
    pos = position_from_state(state)
    color = state.side_to_move
    moves = [wrap_move(pos, m, color) for m in pos.legal_moves_int()]
    moves.sort(key=Move.sort_key)
    return moves


def apply_move(state: GameState, move: Move) -> GameState:
    """Successor state after a legal move; raises IllegalMoveError otherwise."""
    validate_state(state)
    pos = position_from_state(state)
    color = state.side_to_move
    for m in pos.legal_moves_int():
        if wrap_move(pos, m, color) == move:
            pos.make(m)
            return state_from_position(pos)
    raise IllegalMoveError(f"illegal move in this position: {move}")


def status(state: GameState) -> GameStatus:
    """Game status of the side to move.

    Terminal statuses take priority: no legal moves means checkmate or
    stalemate.  A check in a materially dead position reports as check; the
    draw would be adjudicated one ply later anyway.  The fifty-move rule and
    repetition are not adjudicated here (no history in a single state).
    """
    validate_state(state)
    pos = position_from_state(state)
    has_moves = bool(pos.legal_moves_int())
    in_check = pos.in_check()
    if not has_moves:
        return GameStatus.CHECKMATE if in_check else GameStatus.STALEMATE
    if in_check:
        return GameStatus.CHECK
    if pos.insufficient_material():
        return GameStatus.DRAW_INSUFFICIENT_MATERIAL
    return GameStatus.ONGOING


def status_of_position(pos: _Position) -> GameStatus:
    """Status for an internal position (no validation; used by fast paths)."""
    has_moves = bool(pos.legal_moves_int())
    in_check = pos.in_check()
    if not has_moves:
        return GameStatus.CHECKMATE if in_check else GameStatus.STALEMATE
    if in_check:
        return GameStatus.CHECK
    if pos.insufficient_material():
        return GameStatus.DRAW_INSUFFICIENT_MATERIAL
    return GameStatus.ONGOING


def perft(state: GameState, depth: int) -> int:
    """Count of leaf nodes of the legal move tree at the given depth."""
    if depth < 0:
        raise ValueError("perft depth must be non-negative")
    validate_state(state)
    pos = position_from_state(state)
    return pos.perft(depth)
