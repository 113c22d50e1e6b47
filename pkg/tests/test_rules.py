"""Engine correctness: published perft constants, edge cases, and
property comparison against the naive reference implementation."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from reference_rules import (
    naive_apply,
    naive_in_check,
    naive_insufficient_material,
    naive_legal_moves,
    naive_status,
)
from royalgame.errors import IllegalMoveError, InvalidStateError
from royalgame.notation import parse_fen, render_fen
from royalgame.rules import (
    BLACK,
    GameState,
    GameStatus,
    Move,
    Piece,
    WHITE,
    apply_move,
    legal_moves,
    perft,
    status,
    validate_state,
)
from conftest import playout

# Positions with published full-depth node counts; depth: nodes.
PERFT_FENS = [
    (
        "r3k2r/p1ppqpb1/bn2pnp1/3PN3/1p2P3/2N2Q1p/PPPBBPPP/R3K2R w KQkq - 0 1",
        {1: 48, 2: 2039, 3: 97862},
    ),
    ("8/2p5/3p4/KP5r/1R3p1k/8/4P1P1/8 w - - 0 1", {1: 14, 2: 191, 3: 2812, 4: 43238}),
    (
        "r3k2r/Pppp1ppp/1b3nbN/nP6/BBP1P3/q4N2/Pp1P2PP/R2Q1RK1 w kq - 0 1",
        {1: 6, 2: 264, 3: 9467},
    ),
    ("rnbq1k1r/pp1Pbppp/2p5/8/2B5/8/PPP1NnPP/RNBQK2R w KQ - 1 8", {1: 44, 2: 1486, 3: 62379}),
    (
        "r4rk1/1pp1qppp/p1np1n2/2b1p1B1/2B1P1b1/P1NP1N2/1PP1QPPP/R4RK1 w - - 0 10",
        {1: 46, 2: 2079, 3: 89890},
    ),
]


def test_perft_startpos():
    state = GameState.initial()
    for depth, want in ((1, 20), (2, 400), (3, 8902), (4, 197281)):
        assert perft(state, depth) == want
    assert perft(state, 0) == 1


@pytest.mark.parametrize("fen,expected", PERFT_FENS)
def test_perft_published_positions(fen, expected):
    state = parse_fen(fen)
    for depth, want in expected.items():
        assert perft(state, depth) == want, f"{fen} depth {depth}"


def test_perft_rejects_negative_depth():
    with pytest.raises(ValueError):
        perft(GameState.initial(), -1)


# --- single-position edge cases ------------------------------------------


def test_en_passant_capture_is_generated_and_applied():
    state = parse_fen("rnbqkbnr/ppp1p1pp/8/3pPp2/8/8/PPPP1PPP/RNBQKBNR w KQkq f6 0 3")
    ep = [m for m in legal_moves(state) if m.is_en_passant]
    assert len(ep) == 1
    move = ep[0]
    assert move.is_capture and move.piece == Piece("P", WHITE)
    after = apply_move(state, move)
    assert after.piece_at(move.destination) == Piece("P", WHITE)
    assert after.piece_at(move.destination - 8) is None  # f5 pawn gone


def test_en_passant_illegal_when_it_exposes_king():
    # Rank skewer: capturing exposes the white king to the h5 rook.
    state = parse_fen("8/8/8/KPp4r/8/8/6k1/8 w - c6 0 2")
    assert not any(m.is_en_passant for m in legal_moves(state))


def test_en_passant_legal_for_only_one_of_two_pawns_when_pinned():
    # The d5 pawn is pinned to its king along the d-file; f5 pawn is free.
    state = parse_fen("3r4/8/8/3PpP2/8/3K4/8/7k w - e6 0 2")
    ep = [m for m in legal_moves(state) if m.is_en_passant]
    assert [m.origin for m in ep] == [37]  # f5 only


def test_castling_blocked_by_attack_on_transit_square():
    # Black rook on f8 covers f1: white may not castle kingside.
    state = parse_fen("5r2/8/8/8/8/8/k7/4K2R w K - 0 1")
    assert not any(m.castle for m in legal_moves(state))


def test_castling_allowed_when_only_rook_square_attacked():
    # Attack on h1 itself does not forbid kingside castling.
    state = parse_fen("7r/8/8/8/8/8/k7/4K2R w K - 0 1")
    castles = [m for m in legal_moves(state) if m.castle]
    assert len(castles) == 1 and castles[0].castle == "kingside"


def test_queenside_castle_b_square_may_be_attacked():
    # b1 attacked is fine; only d1/c1 transit and e1 matter.
    state = parse_fen("1r6/7k/8/8/8/8/8/R3K3 w Q - 0 1")
    castles = [m for m in legal_moves(state) if m.castle]
    assert len(castles) == 1 and castles[0].castle == "queenside"


def test_rook_capture_removes_enemy_castling_right():
    state = parse_fen("r3k3/8/8/8/8/8/8/R3K2B w Qq - 0 1")
    bishop_takes = next(
        m for m in legal_moves(state) if m.piece.kind == "B" and m.destination == 56
    )
    after = apply_move(state, bishop_takes)
    assert after.castling_rights == frozenset("Q")


def test_promotion_generates_four_kinds_in_canonical_order():
    state = parse_fen("8/P7/8/8/8/8/k7/4K3 w - - 0 1")
    promos = [m.promotion for m in legal_moves(state) if m.promotion]
    assert promos == ["N", "B", "R", "Q"]


def test_underpromotion_capture_applies():
    state = parse_fen("1q6/P7/8/8/8/8/k7/4K3 w - - 0 1")
    knight_cap = next(
        m for m in legal_moves(state) if m.promotion == "N" and m.is_capture
    )
    after = apply_move(state, knight_cap)
    assert after.piece_at(57) == Piece("N", WHITE)


def test_double_check_only_king_moves():
    # Knight on f7 and rook on h5 both give check; blocking is futile.
    state = parse_fen("8/5N2/8/7R/7k/8/8/4K3 b - - 0 1")
    assert naive_in_check(state)
    moves = legal_moves(state)
    assert moves and all(m.piece.kind == "K" for m in moves)


def test_checkmate_and_stalemate_statuses():
    mate = parse_fen("rnb1kbnr/pppp1ppp/8/4p3/6Pq/5P2/PPPPP2P/RNBQKBNR w KQkq - 1 3")
    assert status(mate) is GameStatus.CHECKMATE
    stale = parse_fen("7k/5Q2/6K1/8/8/8/8/8 b - - 0 1")
    assert status(stale) is GameStatus.STALEMATE


def test_check_outranks_insufficient_material():
    # Lone bishop gives check in a KBvK ending: report check.
    state = parse_fen("4k3/8/8/1B6/8/8/8/4K3 b - - 0 1")
    assert status(state) is GameStatus.CHECK


def test_insufficient_material_cases():
    dead = [
        "4k3/8/8/8/8/8/8/4K3 w - - 0 1",  # K v K
        "4k3/8/8/8/8/8/8/4KN2 w - - 0 1",  # KN v K
        "4k3/8/8/8/8/8/8/4KB2 w - - 0 1",  # KB v K
        "2b1k3/8/8/8/8/8/8/4KB2 w - - 0 1",  # same-shade bishops
    ]
    alive = [
        "4k3/8/8/8/8/8/8/3NKN2 w - - 0 1",  # two knights
        "1b2k3/8/8/8/8/8/8/4KB2 w - - 0 1",  # opposite-shade bishops
        "4k3/8/8/8/8/8/4P3/4K3 w - - 0 1",  # pawn
    ]
    for fen in dead:
        assert status(parse_fen(fen)) is GameStatus.DRAW_INSUFFICIENT_MATERIAL, fen
    for fen in alive:
        assert status(parse_fen(fen)) is GameStatus.ONGOING, fen


def test_apply_move_rejects_foreign_move():
    state = GameState.initial()
    bogus = Move(origin=12, destination=28, piece=Piece("P", WHITE), is_capture=True)
    with pytest.raises(IllegalMoveError):
        apply_move(state, bogus)


def test_apply_move_bookkeeping():
    state = GameState.initial()
    e4 = next(m for m in legal_moves(state) if m.origin == 12 and m.destination == 28)
    after = apply_move(state, e4)
    assert after.side_to_move == BLACK
    assert after.en_passant_target == 20  # e3, recorded after every double push
    assert after.halfmove_clock == 0
    assert after.fullmove_number == 1
    nf6 = next(m for m in legal_moves(after) if m.piece.kind == "N" and m.destination == 45)
    after2 = apply_move(after, nf6)
    assert after2.en_passant_target is None
    assert after2.halfmove_clock == 1
    assert after2.fullmove_number == 2


# --- state validation ------------------------------------------------------


def test_validate_rejects_broken_states():
    cases = [
        # two white kings
        ("one-king-per-color", "4k3/8/8/8/8/8/8/3KK3 w - - 0 1"),
        # pawn on rank 8
        ("pawn-on-back-rank", "P3k3/8/8/8/8/8/8/4K3 w - - 0 1"),
        # castling right without rook on h1
        ("castling-rights-placement", "4k3/8/8/8/8/8/8/4K3 w K - 0 1"),
        # en passant target on the wrong rank for the mover
        ("en-passant-rank", "4k3/8/8/8/8/8/8/4K3 w - e3 0 1"),
    ]
    for invariant, fen in cases:
        with pytest.raises(InvalidStateError) as err:
            validate_state(parse_fen(fen))
        assert err.value.invariant == invariant, fen


def test_validate_rejects_side_not_to_move_in_check():
    # White to move while black is already in check: unreachable state.
    bad = GameState(
        placement={
            56: Piece("R", WHITE),  # a8, checking along the eighth rank
            60: Piece("K", BLACK),  # e8
            4: Piece("K", WHITE),  # e1
        },
        side_to_move=WHITE,
        castling_rights=frozenset(),
    )
    with pytest.raises(InvalidStateError) as err:
        validate_state(bad)
    assert err.value.invariant == "side-not-to-move-in-check"


# --- properties against the naive reference --------------------------------


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000), plies=st.integers(0, 60))
def test_engine_matches_reference_along_playouts(seed, plies):
    states = playout(seed, max_plies=plies)
    state = states[-1]
    fast = legal_moves(state)
    slow = naive_legal_moves(state)
    assert fast == slow, render_fen(state)
    assert status(state) == naive_status(state), render_fen(state)
    for move in fast:
        assert apply_move(state, move) == naive_apply(state, move), (
            render_fen(state),
            move,
        )


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_move_list_is_sorted_and_unique(seed):
    state = playout(seed, max_plies=40)[-1]
    moves = legal_moves(state)
    keys = [m.sort_key() for m in moves]
    assert keys == sorted(keys)
    assert len(set(moves)) == len(moves)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_insufficient_material_matches_reference(seed):
    state = playout(seed, max_plies=120)[-1]
    from royalgame.rules.position import position_from_state

    assert position_from_state(state).insufficient_material() == (
        naive_insufficient_material(state)
    )
