"""Square-list board notation: golden bytes, strictness, reconstruction."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from royalgame.errors import BadPairSyntaxError, DuplicateSquareError
from royalgame.notation import (
    parse_fen,
    parse_square_list,
    render_square_list,
    state_from_square_list,
)
from royalgame.rules import GameState, WHITE
from conftest import playout

# One mid-game board rendered by hand; uppercase = white, ascending squares.
GOLDEN_BOARD = "h1:K, a2:P, g2:P, h3:P, b4:p, g4:R, f5:r, a6:R, f6:p, b7:r, f7:k"
GOLDEN_FEN = "8/1r3k2/R4p2/5r2/1p4R1/7P/P5P1/7K w - - 0 1"


def test_golden_board_bytes():
    assert render_square_list(parse_fen(GOLDEN_FEN)) == GOLDEN_BOARD


def test_initial_board_starts_with_a1_rook():
    text = render_square_list(GameState.initial())
    assert text.startswith("a1:R, b1:N, c1:B, d1:Q, e1:K, f1:B, g1:N, h1:R, a2:P")
    assert text.endswith("a8:r, b8:n, c8:b, d8:q, e8:k, f8:b, g8:n, h8:r")


def test_square_order_is_ascending():
    placement = parse_square_list(GOLDEN_BOARD)
    squares = list(placement)
    # parse preserves written order; canonical text must be ascending
    assert squares == sorted(squares)


def test_strict_parse_rejects_non_canonical_text():
    for text in (
        "a2:P, h1:K",  # wrong order
        "h1:K,a2:P",  # missing space
        "h1 : K",  # stray spaces
        "h1:K, a2:P,",  # trailing comma
        "h1:k, A2:P",  # bad case on square name
    ):
        with pytest.raises(BadPairSyntaxError):
            parse_square_list(text, strict=True)


def test_lenient_parse_accepts_reordered_pairs():
    placement = parse_square_list("a2:P, h1:K", strict=False)
    assert len(placement) == 2


def test_duplicate_square_rejected():
    with pytest.raises(DuplicateSquareError):
        parse_square_list("h1:K, h1:Q", strict=False)


def test_garbage_rejected():
    for text in ("", "i9:K", "h1:X", "h1", "h1:KK", "not a board"):
        with pytest.raises(BadPairSyntaxError):
            parse_square_list(text, strict=False)


def test_reconstruction_of_initial_position_recovers_everything():
    text = render_square_list(GameState.initial())
    state = state_from_square_list(text)
    assert state == GameState.initial()


def test_reconstruction_is_lossy_on_purpose():
    # Black to move with an en passant square; both facts vanish.
    fen = "rnbqkbnr/ppp1pppp/8/8/3pP3/8/PPPP1PPP/RNBQKBNR b KQkq e3 0 2"
    original = parse_fen(fen)
    rebuilt = state_from_square_list(render_square_list(original))
    assert rebuilt.side_to_move == WHITE
    assert rebuilt.en_passant_target is None
    assert rebuilt.placement == dict(original.placement)
    # Anchors untouched, so castling rights are re-granted in full.
    assert rebuilt.castling_rights == frozenset("KQkq")


def test_reconstruction_drops_rights_when_anchor_moved():
    fen = "rnbq1bnr/ppppkppp/8/4p3/4P3/8/PPPP1PPP/RNBQKBNR w KQ - 2 3"
    rebuilt = state_from_square_list(render_square_list(parse_fen(fen)))
    assert rebuilt.castling_rights == frozenset("KQ")


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10_000), plies=st.integers(0, 80))
def test_square_list_round_trip_along_playouts(seed, plies):
    state = playout(seed, max_plies=plies)[-1]
    text = render_square_list(state)
    assert parse_square_list(text, strict=True) == dict(state.placement)
    # Reconstruction assumes white to move, so it is only guaranteed for
    # boards that actually were; a black-in-check board has no valid
    # white-to-move reading and must raise instead of inventing one.
    if state.side_to_move == WHITE:
        rebuilt = state_from_square_list(text)
        assert rebuilt.placement == dict(state.placement)
