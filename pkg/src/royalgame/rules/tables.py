"""Precomputed attack tables for the move generator.

Everything here is plain ints used as 64-bit boards (bit i = square i).
Slider attacks use per-square occupancy-masked lookup dicts, enumerated with
the carry-rippler subset trick; the tables are built once at import time.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

BB_ALL = 0xFFFF_FFFF_FFFF_FFFF
BB_RANK_1 = 0xFF
BB_RANK_8 = BB_RANK_1 << 56
BB_FILE_A = 0x0101_0101_0101_0101
BB_FILE_H = BB_FILE_A << 7

BB_RANKS = [BB_RANK_1 << (8 * r) for r in range(8)]
BB_FILES = [BB_FILE_A << f for f in range(8)]


def bit(sq: int) -> int:
    return 1 << sq


def lsb(bb: int) -> int:
    return (bb & -bb).bit_length() - 1


def iter_bits(bb: int):
    while bb:
        low = bb & -bb
        yield low.bit_length() - 1
        bb ^= low


def _step_attacks(sq: int, deltas) -> int:
    mask = 0
    f, r = sq & 7, sq >> 3
    for df, dr in deltas:
        nf, nr = f + df, r + dr
        if 0 <= nf < 8 and 0 <= nr < 8:
            mask |= bit(nr * 8 + nf)
    return mask


_KNIGHT_DELTAS = [(1, 2), (2, 1), (2, -1), (1, -2), (-1, -2), (-2, -1), (-2, 1), (-1, 2)]
_KING_DELTAS = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)]

KNIGHT_ATTACKS = [_step_attacks(sq, _KNIGHT_DELTAS) for sq in range(64)]
KING_ATTACKS = [_step_attacks(sq, _KING_DELTAS) for sq in range(64)]
# PAWN_ATTACKS[is_white][sq]: squares a pawn of that color on sq attacks.
PAWN_ATTACKS = {
    True: [_step_attacks(sq, [(-1, 1), (1, 1)]) for sq in range(64)],
    False: [_step_attacks(sq, [(-1, -1), (1, -1)]) for sq in range(64)],
}


def _sliding_attacks(sq: int, occupied: int, deltas) -> int:
    mask = 0
    f, r = sq & 7, sq >> 3
    for df, dr in deltas:
        nf, nr = f + df, r + dr
        while 0 <= nf < 8 and 0 <= nr < 8:
            nsq = nr * 8 + nf
            mask |= bit(nsq)
            if occupied & bit(nsq):
                break
            nf += df
            nr += dr
    return mask


def _carry_rippler(mask: int):
    subset = 0
    while True:
        yield subset
        subset = (subset - mask) & mask
        if not subset:
            break


def _edges(sq: int) -> int:
    return ((BB_RANK_1 | BB_RANK_8) & ~BB_RANKS[sq >> 3]) | (
        (BB_FILE_A | BB_FILE_H) & ~BB_FILES[sq & 7]
    )


def _attack_table(deltas) -> Tuple[List[int], List[Dict[int, int]]]:
    masks: List[int] = []
    tables: List[Dict[int, int]] = []
    for sq in range(64):
        relevant = _sliding_attacks(sq, 0, deltas) & ~_edges(sq)
        table = {
            subset: _sliding_attacks(sq, subset, deltas)
            for subset in _carry_rippler(relevant)
        }
        masks.append(relevant)
        tables.append(table)
    return masks, tables

DIAG_MASKS, DIAG_ATTACKS = _attack_table([(1, 1), (1, -1), (-1, 1), (-1, -1)])
FILE_MASKS, FILE_ATTACKS = _attack_table([(0, 1), (0, -1)])
RANK_MASKS, RANK_ATTACKS = _attack_table([(1, 0), (-1, 0)])


def rook_attacks(sq: int, occupied: int) -> int:
    return (
        RANK_ATTACKS[sq][occupied & RANK_MASKS[sq]]
        | FILE_ATTACKS[sq][occupied & FILE_MASKS[sq]]
    )


def bishop_attacks(sq: int, occupied: int) -> int:
    return DIAG_ATTACKS[sq][occupied & DIAG_MASKS[sq]]


def _build_lines():
    line = [[0] * 64 for _ in range(64)]
    between = [[0] * 64 for _ in range(64)]
    for a in range(64):
        fa, ra = a & 7, a >> 3
        for b in range(64):
            if a == b:
                continue
            fb, rb = b & 7, b >> 3
            df, dr = fb - fa, rb - ra
            if df and dr and abs(df) != abs(dr):
                continue
            step = ((0 if df == 0 else df // abs(df)), (0 if dr == 0 else dr // abs(dr)))
            # walk the whole line through a and b, and the open segment between
            full = bit(a) | bit(b)
            seg = 0
            f, r = fa + step[0], ra + step[1]
            while (f, r) != (fb, rb):
                seg |= bit(r * 8 + f)
                f, r = f + step[0], r + step[1]
            full |= seg
            f, r = fa - step[0], ra - step[1]
            while 0 <= f < 8 and 0 <= r < 8:
                full |= bit(r * 8 + f)
                f, r = f - step[0], r - step[1]
            f, r = fb + step[0], rb + step[1]
            while 0 <= f < 8 and 0 <= r < 8:
                full |= bit(r * 8 + f)
                f, r = f + step[0], r + step[1]
            line[a][b] = full
            between[a][b] = seg
    return line, between


LINE, BETWEEN = _build_lines()
