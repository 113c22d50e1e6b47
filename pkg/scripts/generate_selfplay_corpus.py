#!/usr/bin/env python3
"""Generate the bundled self-play PGN corpus under data/games/.

Games open from a small weighted book of common lines, then continue with a
seeded capture-greedy policy that always plays an immediate mate when one
exists.  Everything is deterministic in the seed, so the corpus can be
regenerated byte for byte.

Run from the repository root:

    python3 scripts/generate_selfplay_corpus.py --out data/games --files 6 --games-per-file 40
"""

import argparse
import os
import random
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from royalgame.notation import parse_san, render_san
from royalgame.rules import GameState, GameStatus, apply_move, legal_moves, status
from royalgame.rules.engine import encode_move
from royalgame.rules.position import position_from_state

OPENING_BOOK = [
    (30, "e4 e5 Nf3 Nc6 Bb5 a6 Ba4 Nf6"),
    (20, "e4 e5 Nf3 Nc6 Bc4 Bc5 c3 Nf6"),
    (18, "e4 c5 Nf3 d6 d4 cxd4 Nxd4 Nf6"),
    (10, "e4 e6 d4 d5 Nc3 Bb4"),
    (10, "e4 c6 d4 d5 Nc3 dxe4 Nxe4"),
    (26, "d4 d5 c4 e6 Nc3 Nf6 Bg5 Be7"),
    (16, "d4 Nf6 c4 e6 Nf3 b6"),
    (12, "d4 d5 Nf3 Nf6 Bf4 e6"),
    (8, "c4 e5 Nc3 Nf6 Nf3 Nc6"),
    (6, "Nf3 d5 g3 Nf6 Bg2 e6"),
]

PIECE_VALUE = {"P": 1, "N": 3, "B": 3, "R": 5, "Q": 9, "K": 0}

BOT_NAMES = [
    "sp-aldous", "sp-bertha", "sp-cramer", "sp-dahlia",
    "sp-elwood", "sp-fresnel", "sp-gorgon", "sp-hypatia",
]


def mating_move(state, moves):
    """Return a move that mates immediately, or None."""
    pos = position_from_state(state)
    for move in moves:
        code = encode_move(move)
        undo = pos.make(code)
        mate = pos.in_check() and not pos.legal_moves_int()
        pos.unmake(code, undo)
        if mate:
            return move
    return None


def pick_move(state, rng):
    moves = legal_moves(state)
    mate = mating_move(state, moves)
    if mate is not None:
        return mate
    captures = [m for m in moves if m.is_capture]
    if captures and rng.random() < 0.6:
        best = max(
            PIECE_VALUE[state.placement[m.destination].kind] if not m.is_en_passant else 1
            for m in captures
        )
        top = [
            m
            for m in captures
            if (PIECE_VALUE[state.placement[m.destination].kind] if not m.is_en_passant else 1) == best
        ]
        return rng.choice(top)
    pushes = [m for m in moves if m.piece.kind == "P"]
    if pushes and rng.random() < 0.2:
        return rng.choice(pushes)
    return rng.choice(moves)


def material_balance(state):
    total = 0
    for piece in state.placement.values():
        value = PIECE_VALUE[piece.kind]
        total += value if piece.color == "w" else -value
    return total


def play_game(rng, max_plies=180):
    state = GameState.initial()
    san_moves = []

    weights, lines = zip(*[(w, line.split()) for w, line in OPENING_BOOK])
    line = rng.choices(lines, weights=weights, k=1)[0]
    depth = rng.randint(2, len(line))
    for token in line[:depth]:
        move = parse_san(state, token)
        san_moves.append(render_san(state, move))
        state = apply_move(state, move)

    result = None
    while result is None:
        st = status(state)
        if st == GameStatus.CHECKMATE:
            result = "0-1" if state.side_to_move == "w" else "1-0"
            break
        if st in (GameStatus.STALEMATE, GameStatus.DRAW_INSUFFICIENT_MATERIAL):
            result = "1/2-1/2"
            break
        if state.halfmove_clock >= 50:
            result = "1/2-1/2"  # drawish shuffling, call it off early
            break
        balance = material_balance(state)
        if len(san_moves) >= 30 and abs(balance) >= 9:
            result = "1-0" if balance > 0 else "0-1"  # hopeless side resigns
            break
        if len(san_moves) >= max_plies:
            result = "1-0" if balance > 3 else ("0-1" if balance < -3 else "1/2-1/2")
            break
        move = pick_move(state, rng)
        san_moves.append(render_san(state, move))
        state = apply_move(state, move)

    return san_moves, result


def format_movetext(san_moves, result, width=78):
    parts = []
    for i, san in enumerate(san_moves):
        if i % 2 == 0:
            parts.append(f"{i // 2 + 1}.")
        parts.append(san)
    parts.append(result)
    lines, current = [], ""
    for part in parts:
        if current and len(current) + 1 + len(part) > width:
            lines.append(current)
            current = part
        else:
            current = f"{current} {part}".strip()
    if current:
        lines.append(current)
    return "\n".join(lines)


def write_file(path, file_index, n_games, base_seed):
    chunks = []
    for g in range(n_games):
        seed = base_seed + file_index * 1000 + g
        rng = random.Random(seed)
        san_moves, result = play_game(rng)
        white, black = rng.sample(BOT_NAMES, 2)
        day = (file_index * n_games + g) % 28 + 1
        tags = [
            ("Event", "Royalgame Self-Play Corpus"),
            ("Site", "sandbox"),
            ("Date", f"2026.07.{day:02d}"),
            ("Round", str(g + 1)),
            ("White", white),
            ("Black", black),
            ("Result", result),
            ("PlyCount", str(len(san_moves))),
            ("Generator", f"selfplay seed={seed}"),
        ]
        header = "\n".join(f'[{k} "{v}"]' for k, v in tags)
        chunks.append(header + "\n\n" + format_movetext(san_moves, result) + "\n")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(chunks))
    return n_games


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/games")
    ap.add_argument("--files", type=int, default=6)
    ap.add_argument("--games-per-file", type=int, default=40)
    ap.add_argument("--seed", type=int, default=41)
    args = ap.parse_args()

    os.makedirs(args.out, exist_ok=True)
    total = 0
    for i in range(args.files):
        path = os.path.join(args.out, f"selfplay_{i:02d}.pgn")
        total += write_file(path, i, args.games_per_file, args.seed)
        print(f"wrote {path}")
    print(f"{total} games")


if __name__ == "__main__":
    main()
