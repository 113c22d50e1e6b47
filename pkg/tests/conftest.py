"""Shared test helpers: seeded playouts and tiny corpus builders."""

from __future__ import annotations

import random
import sys
from pathlib import Path
from typing import List

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for reference_rules

from royalgame.rules import GameState, apply_move, legal_moves


def playout(seed: int, max_plies: int = 60) -> List[GameState]:
    """States along one random legal game, initial position included."""
    rng = random.Random(seed)
    state = GameState.initial()
    states = [state]
    for _ in range(max_plies):
        moves = legal_moves(state)
        if not moves:
            break
        state = apply_move(state, rng.choice(moves))
        states.append(state)
        if state.halfmove_clock >= 100:
            break
    return states


@pytest.fixture(scope="session")
def playout_states() -> List[GameState]:
    """A reusable bag of positions of varied depth (a few hundred)."""
    states: List[GameState] = []
    for seed in range(12):
        states.extend(playout(seed, max_plies=50))
    return states


SCHOLARS_MATE_PGN = """\
[Event "Casual"]
[Site "?"]
[Date "2026.01.02"]
[Round "1"]
[White "Anna"]
[Black "Ben"]
[Result "1-0"]

1. e4 e5 2. Bc4 Nc6 3. Qh5 Nf6 4. Qxf7# 1-0
"""

QUEENS_GAMBIT_PGN = """\
[Event "Casual"]
[Site "?"]
[Date "2026.01.03"]
[Round "2"]
[White "Cara"]
[Black "Dev"]
[Result "*"]

1. d4 d5 2. c4 e6 *
"""


@pytest.fixture
def pgn_dir(tmp_path) -> Path:
    d = tmp_path / "games"
    d.mkdir()
    (d / "a.pgn").write_text(SCHOLARS_MATE_PGN + "\n" + QUEENS_GAMBIT_PGN, encoding="utf-8")
    return d
