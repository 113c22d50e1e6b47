"""Internal mutable position with make/unmake and legal move generation.

This module is the engine room: everything is ints and bitboards for speed.
The public, immutable API lives in rules.engine; nothing outside the package
should need to touch _Position directly.

Internal move encoding (int):
    bits 0-5   origin square
    bits 6-11  destination square
    bits 12-14 promotion piece code (0 = none)
    bit  15    en passant capture
    bit  16    castling (destination tells the side)
"""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..errors import InvalidStateError
from .tables import (
    BB_RANK_1,
    BB_RANK_8,
    BB_RANKS,
    BETWEEN,
    KING_ATTACKS,
    KNIGHT_ATTACKS,
    LINE,
    PAWN_ATTACKS,
    bishop_attacks,
    bit,
    lsb,
    rook_attacks,
)
from .types import (
    BLACK,
    WHITE,
    GameState,
    Piece,
)

# piece type codes
P, N, B, R, Q, K = 1, 2, 3, 4, 5, 6
KIND_OF_CODE = "?PNBRQK"
CODE_OF_KIND = {"P": P, "N": N, "B": B, "R": R, "Q": Q, "K": K}

EP_FLAG = 1 << 15
CASTLE_FLAG = 1 << 16

A1, B1, C1, D1, E1, F1, G1, H1 = range(8)
A8, B8, C8, D8, E8, F8, G8, H8 = range(56, 64)

# castling rights are stored as a bitboard over rook home squares
_RIGHT_OF_TOKEN = {"K": bit(H1), "Q": bit(A1), "k": bit(H8), "q": bit(A8)}
_TOKEN_OF_RIGHT = {v: k for k, v in _RIGHT_OF_TOKEN.items()}

_DARK_SQUARES = 0xAA55_AA55_AA55_AA55


class _Position:
    __slots__ = ("bb", "occ_w", "occ_b", "turn", "castling", "ep", "halfmove", "fullmove")

    def __init__(self):
        self.bb = [0] * 7  # indexed by piece code, both colors merged
        self.occ_w = 0
        self.occ_b = 0
        self.turn = True  # True: white to move
        self.castling = 0
        self.ep: Optional[int] = None
        self.halfmove = 0
        self.fullmove = 1

    # -- queries ------------------------------------------------------------

    def piece_type_at(self, sq: int) -> int:
        m = 1 << sq
        bb = self.bb
        if bb[P] & m:
            return P
        if bb[N] & m:
            return N
        if bb[B] & m:
            return B
        if bb[R] & m:
            return R
        if bb[Q] & m:
            return Q
        if bb[K] & m:
            return K
        return 0

    def attackers(self, by_white: bool, sq: int, occupied: int) -> int:
        """Bitboard of by_white's pieces attacking sq under the given occupancy."""
        bb = self.bb
        side = self.occ_w if by_white else self.occ_b
        hits = (
            (KNIGHT_ATTACKS[sq] & bb[N])
            | (KING_ATTACKS[sq] & bb[K])
            | (PAWN_ATTACKS[not by_white][sq] & bb[P])
        )
        rq = bb[R] | bb[Q]
        if rq & side:
            hits |= rook_attacks(sq, occupied) & rq
        bq = bb[B] | bb[Q]
        if bq & side:
            hits |= bishop_attacks(sq, occupied) & bq
        return hits & side

    def king_sq(self, white: bool) -> int:
        return lsb(self.bb[K] & (self.occ_w if white else self.occ_b))

    def in_check(self) -> bool:
        white = self.turn
        king = self.king_sq(white)
        return bool(self.attackers(not white, king, self.occ_w | self.occ_b))

    def _slider_blockers(self, king: int, white: bool) -> int:
        """Own pieces that are the sole shield between king and an enemy slider."""
        bb = self.bb
        enemy = self.occ_b if white else self.occ_w
        own = self.occ_w if white else self.occ_b
        occ = self.occ_w | self.occ_b
        snipers = (
            (rook_attacks(king, 0) & (bb[R] | bb[Q]))
            | (bishop_attacks(king, 0) & (bb[B] | bb[Q]))
        ) & enemy
        blockers = 0
        while snipers:
            sn_bb = snipers & -snipers
            sn = sn_bb.bit_length() - 1
            snipers ^= sn_bb
            wall = BETWEEN[king][sn] & occ
            if wall and not wall & (wall - 1) and wall & own:
                blockers |= wall
        return blockers

    def insufficient_material(self) -> bool:
        bb = self.bb
        if bb[P] or bb[R] or bb[Q]:
            return False
        minors = bb[N] | bb[B]
        if bin(minors).count("1") <= 1:
            return True  # K vs K, KN vs K, KB vs K
        if bb[N]:
            return False
        # bishops only, all living on one square color
        return not (bb[B] & _DARK_SQUARES) or not (bb[B] & ~_DARK_SQUARES)

    # -- move generation ----------------------------------------------------

    def legal_moves_int(self) -> List[int]:
        moves: List[int] = []
        white = self.turn
        own = self.occ_w if white else self.occ_b
        them = self.occ_b if white else self.occ_w
        occ = own | them
        king = lsb(self.bb[K] & own)
        checkers = self.attackers(not white, king, occ)
        if checkers:
            self._gen_evasions(moves, king, checkers, own, them, occ, white)
        else:
            self._gen_regular(moves, king, own, them, occ, white)
        return moves

    def _gen_regular(self, moves, king, own, them, occ, white):
        bb = self.bb
        blockers = self._slider_blockers(king, white)
        free = ~own
        line_k = LINE[king]

        pieces = bb[N] & own
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            atts = KNIGHT_ATTACKS[sq] & free
            if low & blockers:
                atts &= line_k[sq]
            while atts:
                t = atts & -atts
                moves.append(sq | (t.bit_length() - 1) << 6)
                atts ^= t

        pieces = (bb[B] | bb[Q]) & own
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            atts = bishop_attacks(sq, occ) & free
            if low & blockers:
                atts &= line_k[sq]
            while atts:
                t = atts & -atts
                moves.append(sq | (t.bit_length() - 1) << 6)
                atts ^= t

        pieces = (bb[R] | bb[Q]) & own
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            atts = rook_attacks(sq, occ) & free
            if low & blockers:
                atts &= line_k[sq]
            while atts:
                t = atts & -atts
                moves.append(sq | (t.bit_length() - 1) << 6)
                atts ^= t

        # king steps
        occ_wo_king = occ ^ bit(king)
        atts = KING_ATTACKS[king] & free
        while atts:
            t = atts & -atts
            to = t.bit_length() - 1
            atts ^= t
            if not self.attackers(not white, to, occ_wo_king):
                moves.append(king | to << 6)

        # castling (we are not in check here)
        castling = self.castling
        if white:
            if castling & bit(H1) and not occ & (bit(F1) | bit(G1)):
                if not self.attackers(False, F1, occ) and not self.attackers(False, G1, occ):
                    moves.append(E1 | G1 << 6 | CASTLE_FLAG)
            if castling & bit(A1) and not occ & (bit(B1) | bit(C1) | bit(D1)):
                if not self.attackers(False, D1, occ) and not self.attackers(False, C1, occ):
                    moves.append(E1 | C1 << 6 | CASTLE_FLAG)
        else:
            if castling & bit(H8) and not occ & (bit(F8) | bit(G8)):
                if not self.attackers(True, F8, occ) and not self.attackers(True, G8, occ):
                    moves.append(E8 | G8 << 6 | CASTLE_FLAG)
            if castling & bit(A8) and not occ & (bit(B8) | bit(C8) | bit(D8)):
                if not self.attackers(True, D8, occ) and not self.attackers(True, C8, occ):
                    moves.append(E8 | C8 << 6 | CASTLE_FLAG)

        # pawns
        pawn_att = PAWN_ATTACKS[white]
        promo_rank_bb = BB_RANK_8 if white else BB_RANK_1
        start_rank_bb = BB_RANKS[1] if white else BB_RANKS[6]
        step = 8 if white else -8
        pieces = bb[P] & own
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            allowed = line_k[sq] if low & blockers else -1
            atts = pawn_att[sq] & them & allowed
            while atts:
                t = atts & -atts
                to = t.bit_length() - 1
                atts ^= t
                self._push_pawn(moves, sq, to, t & promo_rank_bb)
            one = sq + step
            one_bb = bit(one)
            if not occ & one_bb:
                if one_bb & allowed:
                    self._push_pawn(moves, sq, one, one_bb & promo_rank_bb)
                if low & start_rank_bb:
                    two = one + step
                    two_bb = bit(two)
                    if not occ & two_bb and two_bb & allowed:
                        moves.append(sq | two << 6)

        self._gen_en_passant(moves, white)

    def _gen_evasions(self, moves, king, checkers, own, them, occ, white):
        bb = self.bb
        occ_wo_king = occ ^ bit(king)
        atts = KING_ATTACKS[king] & ~own
        while atts:
            t = atts & -atts
            to = t.bit_length() - 1
            atts ^= t
            if not self.attackers(not white, to, occ_wo_king):
                moves.append(king | to << 6)
        if checkers & (checkers - 1):
            return  # double check: king moves only
        csq = lsb(checkers)
        target = BETWEEN[king][csq] | checkers
        # a pinned piece can never capture or block a checker
        movable = own & ~self._slider_blockers(king, white)

        pieces = bb[N] & movable
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            hits = KNIGHT_ATTACKS[sq] & target
            while hits:
                t = hits & -hits
                moves.append(sq | (t.bit_length() - 1) << 6)
                hits ^= t

        pieces = (bb[B] | bb[Q]) & movable
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            hits = bishop_attacks(sq, occ) & target
            while hits:
                t = hits & -hits
                moves.append(sq | (t.bit_length() - 1) << 6)
                hits ^= t

        pieces = (bb[R] | bb[Q]) & movable
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            hits = rook_attacks(sq, occ) & target
            while hits:
                t = hits & -hits
                moves.append(sq | (t.bit_length() - 1) << 6)
                hits ^= t

        pawn_att = PAWN_ATTACKS[white]
        promo_rank_bb = BB_RANK_8 if white else BB_RANK_1
        start_rank_bb = BB_RANKS[1] if white else BB_RANKS[6]
        step = 8 if white else -8
        block_mask = BETWEEN[king][csq]
        pieces = bb[P] & movable
        while pieces:
            low = pieces & -pieces
            sq = low.bit_length() - 1
            pieces ^= low
            hits = pawn_att[sq] & checkers
            while hits:
                t = hits & -hits
                to = t.bit_length() - 1
                hits ^= t
                self._push_pawn(moves, sq, to, t & promo_rank_bb)
            one = sq + step
            one_bb = bit(one)
            if not occ & one_bb:
                if one_bb & block_mask:
                    self._push_pawn(moves, sq, one, one_bb & promo_rank_bb)
                if low & start_rank_bb:
                    two = one + step
                    two_bb = bit(two)
                    if not occ & two_bb and two_bb & block_mask:
                        moves.append(sq | two << 6)

        self._gen_en_passant(moves, white)

    @staticmethod
    def _push_pawn(moves, sq, to, promoting):
        base = sq | to << 6
        if promoting:
            moves.append(base | N << 12)
            moves.append(base | B << 12)
            moves.append(base | R << 12)
            moves.append(base | Q << 12)
        else:
            moves.append(base)

    def _gen_en_passant(self, moves, white):
        # validated by make/probe: rare enough that correctness beats speed,
        # and it covers the skewer case where the capture exposes our king
        ep = self.ep
        if ep is None:
            return
        own = self.occ_w if white else self.occ_b
        candidates = self.bb[P] & own & PAWN_ATTACKS[not white][ep]
        while candidates:
            low = candidates & -candidates
            sq = low.bit_length() - 1
            candidates ^= low
            move = sq | ep << 6 | EP_FLAG
            undo = self.make(move)
            king = self.king_sq(white)
            safe = not self.attackers(not white, king, self.occ_w | self.occ_b)
            self.unmake(move, undo)
            if safe:
                moves.append(move)

    # -- make / unmake -------------------------------------------------------

    def make(self, move: int) -> Tuple:
        frm = move & 63
        to = (move >> 6) & 63
        promo = (move >> 12) & 7
        bb = self.bb
        white = self.turn
        frm_bb = 1 << frm
        to_bb = 1 << to
        pt = self.piece_type_at(frm)
        undo = (pt, self.ep, self.castling, self.halfmove, 0, 0)
        captured = 0
        captured_sq = to
        self.ep = None
        if move & EP_FLAG:
            captured = P
            captured_sq = to - 8 if white else to + 8
            cap_bb = 1 << captured_sq
            bb[P] ^= cap_bb
            if white:
                self.occ_b ^= cap_bb
            else:
                self.occ_w ^= cap_bb
        elif to_bb & (self.occ_w | self.occ_b):
            captured = self.piece_type_at(to)
            bb[captured] ^= to_bb
            if white:
                self.occ_b ^= to_bb
            else:
                self.occ_w ^= to_bb
            self.castling &= ~to_bb
        bb[pt] ^= frm_bb | to_bb
        if white:
            self.occ_w ^= frm_bb | to_bb
        else:
            self.occ_b ^= frm_bb | to_bb
        if promo:
            bb[P] ^= to_bb
            bb[promo] ^= to_bb
        if move & CASTLE_FLAG:
            if to == G1:
                rbb = (1 << H1) | (1 << F1)
            elif to == C1:
                rbb = (1 << A1) | (1 << D1)
            elif to == G8:
                rbb = (1 << H8) | (1 << F8)
            else:
                rbb = (1 << A8) | (1 << D8)
            bb[R] ^= rbb
            if white:
                self.occ_w ^= rbb
            else:
                self.occ_b ^= rbb
        if pt == K:
            self.castling &= ~(BB_RANK_1 if white else BB_RANK_8)
        elif pt == R:
            self.castling &= ~frm_bb
        if pt == P and (to - frm in (16, -16)):
            self.ep = (frm + to) >> 1
        if pt == P or captured:
            self.halfmove = 0
        else:
            self.halfmove += 1
        if not white:
            self.fullmove += 1
        self.turn = not white
        return (undo[0], undo[1], undo[2], undo[3], captured, captured_sq)

    def unmake(self, move: int, undo: Tuple) -> None:
        pt, ep_old, castling_old, halfmove_old, captured, captured_sq = undo
        frm = move & 63
        to = (move >> 6) & 63
        promo = (move >> 12) & 7
        white = not self.turn  # the side that made the move
        frm_bb = 1 << frm
        to_bb = 1 << to
        bb = self.bb
        if promo:
            bb[promo] ^= to_bb
            bb[P] ^= to_bb
        bb[pt] ^= frm_bb | to_bb
        if white:
            self.occ_w ^= frm_bb | to_bb
        else:
            self.occ_b ^= frm_bb | to_bb
        if move & CASTLE_FLAG:
            if to == G1:
                rbb = (1 << H1) | (1 << F1)
            elif to == C1:
                rbb = (1 << A1) | (1 << D1)
            elif to == G8:
                rbb = (1 << H8) | (1 << F8)
            else:
                rbb = (1 << A8) | (1 << D8)
            bb[R] ^= rbb
            if white:
                self.occ_w ^= rbb
            else:
                self.occ_b ^= rbb
        if captured:
            cap_bb = 1 << captured_sq
            bb[captured] ^= cap_bb
            if white:
                self.occ_b ^= cap_bb
            else:
                self.occ_w ^= cap_bb
        self.ep = ep_old
        self.castling = castling_old
        self.halfmove = halfmove_old
        if not white:
            self.fullmove -= 1
        self.turn = white

    def perft(self, depth: int) -> int:
        if depth <= 0:
            return 1
        moves = self.legal_moves_int()
        if depth == 1:
            return len(moves)
        total = 0
        for m in moves:
            undo = self.make(m)
            total += self.perft(depth - 1)
            self.unmake(m, undo)
        return total

    def copy(self) -> "_Position":
        dup = _Position()
        dup.bb = list(self.bb)
        dup.occ_w = self.occ_w
        dup.occ_b = self.occ_b
        dup.turn = self.turn
        dup.castling = self.castling
        dup.ep = self.ep
        dup.halfmove = self.halfmove
        dup.fullmove = self.fullmove
        return dup


def sort_int_moves(moves: List[int]) -> List[int]:
    """Canonical move order: origin, destination, promotion code."""
    return sorted(moves, key=lambda m: (m & 63, (m >> 6) & 63, (m >> 12) & 7))


def position_from_state(state: GameState) -> _Position:
    pos = _Position()
    for sq, piece in state.placement.items():
        code = CODE_OF_KIND[piece.kind]
        b = 1 << sq
        pos.bb[code] |= b
        if piece.color == WHITE:
            pos.occ_w |= b
        else:
            pos.occ_b |= b
    pos.turn = state.side_to_move == WHITE
    for token in state.castling_rights:
        pos.castling |= _RIGHT_OF_TOKEN[token]
    pos.ep = state.en_passant_target
    pos.halfmove = state.halfmove_clock
    pos.fullmove = state.fullmove_number
    return pos


def state_from_position(pos: _Position) -> GameState:
    placement = {}
    for code in (P, N, B, R, Q, K):
        kind = KIND_OF_CODE[code]
        board = pos.bb[code]
        while board:
            low = board & -board
            sq = low.bit_length() - 1
            board ^= low
            color = WHITE if pos.occ_w & low else BLACK
            placement[sq] = Piece(kind, color)
    rights = frozenset(
        token for right, token in _TOKEN_OF_RIGHT.items() if pos.castling & right
    )
    return GameState(
        placement=placement,
        side_to_move=WHITE if pos.turn else BLACK,
        castling_rights=rights,
        en_passant_target=pos.ep,
        halfmove_clock=pos.halfmove,
        fullmove_number=pos.fullmove,
    )
