"""Reference move policies, served over the same protocol as real models.

* random-legal: uniform over the legal moves, deterministic per (board, seed)
* greedy-solver: a mating move if one exists, else a checking move, else
  random-legal
* frequency: most common move for boards seen in a pair table, global top
  move otherwise - intentionally capable of illegal and hallucinated moves
* noisy: emits a legal move with fixed probability per draw, junk otherwise;
  exists to exercise the retry loop

Each policy is a plain function plus a request handler; the handlers run
in-process for tests and behind ``royalgame baseline serve`` for subprocess
endpoints.
"""

from __future__ import annotations

import hashlib
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Optional, Tuple

from .cohorts import BOARD_PREFIX, RESPONSE_MARKER
from .errors import EmptyTableError, NoLegalMovesError, RoyalgameError
from .notation import render_fen, render_san, state_from_square_list
from .puzzles import solve_one_ply
from .rules import GameState, legal_moves


def board_from_prompt(prompt: str) -> Tuple[str, GameState]:
    """Recover the square-list board from a (templated or bare) prompt."""
    idx = prompt.find(BOARD_PREFIX)
    if idx < 0:
        raise RoyalgameError("prompt carries no board")
    tail = prompt[idx + len(BOARD_PREFIX) :]
    cut = tail.find(" " + RESPONSE_MARKER)
    board_text = tail[:cut] if cut >= 0 else tail.strip()
    return board_text, state_from_square_list(board_text)


def _board_rng(state: GameState, seed: int) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{render_fen(state)}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def random_legal_policy(state: GameState, seed: int = 41) -> str:
    """Uniform choice over legal moves; a pure function of (board, seed)."""
    moves = legal_moves(state)
    if not moves:
        raise NoLegalMovesError(render_fen(state))
    rng = _board_rng(state, seed)
    return render_san(state, rng.choice(moves))


def greedy_solver_policy(state: GameState, seed: int = 41) -> str:
    """Mate if possible, else check, else fall back to random-legal."""
    mates, checks = solve_one_ply(state)
    if mates:
        return render_san(state, mates[0])
    if checks:
        return render_san(state, checks[0])
    return random_legal_policy(state, seed)


@dataclass
class FrequencyTable:
    board_to_move: Dict[str, str]
    global_top: str
    boards: int
    pairs: int


def build_frequency_table(records: Iterable[Dict]) -> FrequencyTable:
    """Modal move per board plus the global modal move, ties broken by SAN."""
    per_board: Dict[str, Counter] = {}
    overall: Counter = Counter()
    pairs = 0
    for record in records:
        board, move = record["board"], record["move"]
        per_board.setdefault(board, Counter())[move] += 1
        overall[move] += 1
        pairs += 1
    if not pairs:
        raise EmptyTableError("no pairs to build a frequency table from")

    def modal(counter: Counter) -> str:
        return min(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]

    return FrequencyTable(
        board_to_move={board: modal(c) for board, c in per_board.items()},
        global_top=modal(overall),
        boards=len(per_board),
        pairs=pairs,
    )


def frequency_policy(board_text: str, table: FrequencyTable) -> str:
    """Table lookup; unseen boards get the global top move, legal or not."""
    return table.board_to_move.get(board_text, table.global_top)


class NoisyPolicy:
    """Legal with probability ``legal_prob`` per draw, junk otherwise.

    With sample=true the draw is keyed on the request id, so retried
    attempts differ yet reruns of the same eval reproduce byte for byte.
    With sample=false the draw is keyed on the prompt alone, keeping the
    greedy contract: identical request, identical text.
    """

    def __init__(self, seed: int = 41, legal_prob: float = 0.1):
        self.seed = seed
        self.legal_prob = legal_prob

    def __call__(self, request: Dict) -> str:
        _, state = board_from_prompt(request["prompt"])
        if request.get("sample"):
            rng = random.Random(f"{self.seed}:{request['id']}")
        else:
            rng = random.Random(f"{self.seed}:{request['prompt']}")
        if rng.random() < self.legal_prob:
            moves = legal_moves(state)
            if not moves:
                raise NoLegalMovesError("no legal moves on this board")
            return render_san(state, rng.choice(moves))
        return rng.choice(("Ke9", "Qz5", "Nx", "0-0-0-0", "Paa"))


POLICY_NAMES = ("random", "greedy", "frequency", "noisy")


def make_baseline_handler(
    policy: str,
    seed: int = 41,
    table: Optional[FrequencyTable] = None,
    legal_prob: float = 0.1,
) -> Callable[[Dict], str]:
    """Request handler for one policy; raised errors become protocol errors."""
    if policy == "random":

        def handle(request: Dict) -> str:
            _, state = board_from_prompt(request["prompt"])
            return random_legal_policy(state, seed)

    elif policy == "greedy":

        def handle(request: Dict) -> str:
            _, state = board_from_prompt(request["prompt"])
            return greedy_solver_policy(state, seed)

    elif policy == "frequency":
        if table is None:
            raise EmptyTableError("frequency policy needs a pair table")
        freq_table = table

        def handle(request: Dict) -> str:
            board_text, _ = board_from_prompt(request["prompt"])
            return frequency_policy(board_text, freq_table)

    elif policy == "noisy":
        handle = NoisyPolicy(seed=seed, legal_prob=legal_prob)

    else:
        raise ValueError(f"unknown policy {policy!r}; pick one of {POLICY_NAMES}")
    return handle


def make_baseline_endpoint(
    policy: str,
    seed: int = 41,
    table: Optional[FrequencyTable] = None,
    legal_prob: float = 0.1,
):
    """In-process endpoint for a baseline policy."""
    from .harness.protocol import InProcessEndpoint

    handler = make_baseline_handler(policy, seed=seed, table=table, legal_prob=legal_prob)

    def fn(request: Dict) -> str:
        return handler(request)

    return InProcessEndpoint(
        fn,
        name=f"baseline-{policy}",
        hello_extra={"policy": policy, "seed": seed},
    )
