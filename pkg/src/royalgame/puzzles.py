"""One-ply puzzle tooling: solve, import, generate.

A puzzle is a white-to-move position.  Its ground truth is exhaustive: every
legal white move is applied and the successor classified, giving the set of
mating moves and the set of checking (non-mating) moves.  "Solved" downstream
means the proposed move belongs to the union of the two sets.

Instances are stored as FEN internally (nothing lossy); the square-list view
the model sees is rendered only at instruction time, mirroring the dataset
pipeline.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    GenerationExhaustedError,
    InvalidStateError,
    RoyalgameError,
    UnsolvableInstanceError,
)
from .notation import parse_fen, render_fen, render_san
from .pgn import PgnGame, parse_pgn_stream
from .rules import WHITE, GameState, Move, square_name
from .rules.engine import wrap_move
from .rules.position import position_from_state, sort_int_moves, state_from_position


def solve_one_ply(state: GameState) -> Tuple[List[Move], List[Move]]:
    """Exhaustively classify every legal move of a white-to-move board.

    Returns (mating_moves, checking_moves) in canonical move order; the two
    sets are disjoint.  Raises InvalidStateError for broken boards and for
    boards where it is not white's turn.
    """
    if state.side_to_move != WHITE:
        raise InvalidStateError("white-to-move", "puzzles are white to move")
    from .rules import validate_state

    validate_state(state)
    pos = position_from_state(state)
    mates: List[Move] = []
    checks: List[Move] = []
    for code in sort_int_moves(pos.legal_moves_int()):
        move = wrap_move(pos, code, WHITE)
        undo = pos.make(code)
        if pos.in_check():
            if pos.legal_moves_int():
                checks.append(move)
            else:
                mates.append(move)
        pos.unmake(code, undo)
    return mates, checks


@dataclass
class PuzzleInstance:
    fen: str
    mate: Tuple[str, ...]  # SAN of mating moves
    check: Tuple[str, ...]  # SAN of checking, non-mating moves

    def state(self) -> GameState:
        return parse_fen(self.fen)

    @property
    def piece_count(self) -> int:
        return len(self.state().placement)

    @property
    def solutions(self) -> Tuple[str, ...]:
        return self.mate + self.check

    def to_record(self) -> Dict:
        state = self.state()
        return {
            "fen": self.fen,
            "mate": list(self.mate),
            "check": list(self.check),
            "piece_count": len(state.placement),
            "black_king": square_name(state.king_square("b")),
        }


def make_instance(state: GameState) -> PuzzleInstance:
    """Solve a board and wrap it; raises UnsolvableInstanceError when barren."""
    mates, checks = solve_one_ply(state)
    if not mates and not checks:
        raise UnsolvableInstanceError(render_fen(state))
    return PuzzleInstance(
        fen=render_fen(state),
        mate=tuple(render_san(state, m) for m in mates),
        check=tuple(render_san(state, m) for m in checks),
    )


# -- import ---------------------------------------------------------------------


def import_puzzles(path: str) -> Tuple[List[PuzzleInstance], List[Dict]]:
    """Read puzzles from a FEN-per-line file or a PGN of set-up positions.

    Unusable records become diagnostic dicts instead of instances; the
    import never aborts on a bad record.
    """
    instances: List[PuzzleInstance] = []
    problems: List[Dict] = []

    def try_board(state: GameState, where: str):
        try:
            instances.append(make_instance(state))
        except UnsolvableInstanceError:
            problems.append(
                {"where": where, "kind": "unsolvable-instance", "detail": render_fen(state)}
            )
        except RoyalgameError as exc:
            problems.append({"where": where, "kind": "invalid-board", "detail": str(exc)})

    if path.endswith(".pgn"):
        for item in parse_pgn_stream(path, validate=False):
            if not isinstance(item, PgnGame):
                problems.append(
                    {"where": f"line {item.line}", "kind": "malformed-record", "detail": item.message}
                )
                continue
            if not item.start_fen:
                problems.append(
                    {"where": f"line {item.line}", "kind": "malformed-record", "detail": "no FEN tag"}
                )
                continue
            try:
                state = parse_fen(item.start_fen)
            except RoyalgameError as exc:
                problems.append(
                    {"where": f"line {item.line}", "kind": "invalid-board", "detail": str(exc)}
                )
                continue
            try_board(state, f"line {item.line}")
    else:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text or text.startswith("#"):
                    continue
                try:
                    state = parse_fen(text)
                except RoyalgameError as exc:
                    problems.append(
                        {"where": f"line {lineno}", "kind": "invalid-board", "detail": str(exc)}
                    )
                    continue
                try_board(state, f"line {lineno}")
    return instances, problems


# -- generation -------------------------------------------------------------------


@dataclass(frozen=True)
class PuzzleConstraints:
    min_pieces: int = 3
    max_pieces: int = 32
    require_mate: bool = True


def _piece_count_of(pos) -> int:
    return bin(pos.occ_w | pos.occ_b).count("1")


def generate_puzzles(
    count: int,
    seed: int,
    constraints: PuzzleConstraints = PuzzleConstraints(),
    max_playouts: int = 20_000,
) -> List[PuzzleInstance]:
    """Generate puzzles from seeded random playouts.

    The playout policy plays an immediate mate whenever one exists, so most
    games end in a mate-in-1 harvest; with require_mate off, mid-playout
    snapshots with any checking move also qualify.  Output order and content
    are functions of (count, seed, constraints) alone.  Raises
    GenerationExhaustedError when max_playouts games were not enough.
    """
    rng = random.Random(seed)
    found: Dict[str, PuzzleInstance] = {}
    playouts = 0
    while len(found) < count:
        if playouts >= max_playouts:
            raise GenerationExhaustedError(
                f"{len(found)}/{count} puzzles after {playouts} playouts"
            )
        playouts += 1
        state = GameState.initial()
        pos = position_from_state(state)
        snapshots: List[str] = []
        mate_fen: Optional[str] = None
        for ply in range(160):
            moves = sort_int_moves(pos.legal_moves_int())
            if not moves:
                break
            if pos.halfmove >= 50:
                break
            # play a mating move when available
            mate_code = None
            for code in moves:
                undo = pos.make(code)
                if pos.in_check() and not pos.legal_moves_int():
                    mate_code = code
                    pos.unmake(code, undo)
                    break
                pos.unmake(code, undo)
            current_fen = None
            if pos.turn:
                n = _piece_count_of(pos)
                if constraints.min_pieces <= n <= constraints.max_pieces:
                    current_fen = render_fen(state_from_position(pos))
                    snapshots.append(current_fen)
            if mate_code is not None:
                mate_fen = current_fen  # None when constraints exclude the board
                pos.make(mate_code)
                break
            pos.make(rng.choice(moves))

        candidates: List[str] = []
        if mate_fen is not None:
            candidates.append(mate_fen)
        if not constraints.require_mate and snapshots:
            picks = min(2, len(snapshots))
            candidates.extend(rng.sample(snapshots, picks))

        for fen in candidates:
            if fen in found:
                continue
            try:
                instance = make_instance(parse_fen(fen))
            except UnsolvableInstanceError:
                continue
            if constraints.require_mate and not instance.mate:
                continue
            found[fen] = instance
            if len(found) >= count:
                break
    return list(found.values())[:count]


# -- stats and serialization ---------------------------------------------------


@dataclass
class PuzzleSetStats:
    count: int
    with_mate: int
    distinct_black_king_squares: int
    piece_count_min: int
    piece_count_max: int
    piece_count_mean: float
    mean_pieces_by_kind: Dict[str, float]
    mean_mate_solutions: float
    mean_check_solutions: float

    def to_json(self) -> str:
        from dataclasses import asdict

        return json.dumps(asdict(self), indent=1, sort_keys=True)


def compute_puzzle_stats(instances: Sequence[PuzzleInstance]) -> PuzzleSetStats:
    kings = set()
    counts = []
    kind_totals: Dict[str, int] = {k: 0 for k in "PNBRQK"}
    mates = 0
    mate_solutions = 0
    check_solutions = 0
    for inst in instances:
        state = inst.state()
        kings.add(state.king_square("b"))
        counts.append(len(state.placement))
        for piece in state.placement.values():
            kind_totals[piece.kind] += 1
        if inst.mate:
            mates += 1
        mate_solutions += len(inst.mate)
        check_solutions += len(inst.check)
    n = len(instances)
    return PuzzleSetStats(
        count=n,
        with_mate=mates,
        distinct_black_king_squares=len(kings),
        piece_count_min=min(counts) if counts else 0,
        piece_count_max=max(counts) if counts else 0,
        piece_count_mean=sum(counts) / n if n else 0.0,
        mean_pieces_by_kind={k: v / n if n else 0.0 for k, v in kind_totals.items()},
        mean_mate_solutions=mate_solutions / n if n else 0.0,
        mean_check_solutions=check_solutions / n if n else 0.0,
    )


def write_puzzles_ndjson(instances: Iterable[PuzzleInstance], path: str) -> str:
    """Write instances; returns the sha256 digest of the file bytes."""
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(json.dumps(inst.to_record(), ensure_ascii=False) + "\n")
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def read_puzzles_ndjson(path: str) -> List[PuzzleInstance]:
    instances = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            instances.append(
                PuzzleInstance(
                    fen=row["fen"], mate=tuple(row["mate"]), check=tuple(row["check"])
                )
            )
    return instances
