"""Turning PGN archives into (board, move) training pairs.

A pair is the position before a move (as seen by the mover) plus the move
in canonical SAN.  Boards are keyed by their square-list rendering, moves by
their SAN bytes; deduplication keeps the first occurrence of each key.
"""

from __future__ import annotations

import csv
import hashlib
import json
import os
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .notation import render_fen, render_san, render_square_list
from .notation.san import parse_san
from .pgn import PgnGame, PgnGameError, parse_pgn_stream
from .rules import WHITE, GameState, Move, apply_move

SIDE_FILTERS = ("white", "all")


@dataclass
class PairSource:
    game_id: str
    ply: int  # 1-based ply index within the game
    white: str
    black: str
    label: str  # file the game came from


@dataclass
class BoardMovePair:
    state: GameState
    move: Move
    san: str
    mover: str
    source: PairSource

    @property
    def board_text(self) -> str:
        return render_square_list(self.state)

    def key(self) -> Tuple[str, str]:
        return (self.board_text, self.san)


def game_id_of(game: PgnGame) -> str:
    seed = "|".join(
        (
            game.source,
            str(game.line),
            game.tag("Event"),
            game.tag("White"),
            game.tag("Black"),
            game.tag("Round"),
        )
    )
    return hashlib.sha256(seed.encode("utf-8")).hexdigest()[:12]


def extract_pairs(
    games: Iterable[PgnGame], side_filter: str = "white"
) -> Iterator[BoardMovePair]:
    """Replay games and yield one pair per (filtered) ply.

    Games passed here are assumed to have been validated by the PGN layer;
    the SAN stored on each pair is re-rendered canonically, so redundant
    disambiguation or missing suffixes in the source text are normalized
    away.
    """
    if side_filter not in SIDE_FILTERS:
        raise ValueError(f"side_filter must be one of {SIDE_FILTERS}")
    for game in games:
        state = game.start_state()
        gid = game_id_of(game)
        white_name = game.tag("White")
        black_name = game.tag("Black")
        for ply, token in enumerate(game.moves, start=1):
            move = parse_san(state, token, strict=True)
            mover = state.side_to_move
            if side_filter == "all" or mover == WHITE:
                yield BoardMovePair(
                    state=state,
                    move=move,
                    san=render_san(state, move),
                    mover=mover,
                    source=PairSource(gid, ply, white_name, black_name, game.source),
                )
            state = apply_move(state, move)


def dedupe_pairs(pairs: Iterable[BoardMovePair]) -> Iterator[BoardMovePair]:
    """Drop repeated (board bytes, SAN bytes) keys, keeping first occurrences."""
    seen = set()
    for pair in pairs:
        key = pair.key()
        if key in seen:
            continue
        seen.add(key)
        yield pair


@dataclass
class CorpusStats:
    game_count: int
    error_count: int
    pair_count: int
    white_pair_count: int
    unique_pair_count: int
    mean_white_moves_per_game: float
    max_white_moves_per_game: int
    move_histogram: Counter
    board_histogram: Counter
    player_move_counts: Counter
    source_game_counts: Counter

    def top_moves(self, k: int = 10) -> List[Tuple[str, int]]:
        return self.move_histogram.most_common(k)

    def top_boards(self, k: int = 10) -> List[Tuple[str, int]]:
        return self.board_histogram.most_common(k)


def compute_stats(
    pairs: Sequence[BoardMovePair],
    games: Sequence[PgnGame],
    errors: Sequence[PgnGameError] = (),
) -> CorpusStats:
    move_hist: Counter = Counter()
    board_hist: Counter = Counter()
    players: Counter = Counter()
    per_game_white: Counter = Counter()
    seen_keys = set()
    white_pairs = 0
    for pair in pairs:
        move_hist[pair.san] += 1
        board_hist[pair.board_text] += 1
        seen_keys.add(pair.key())
        if pair.mover == WHITE:
            white_pairs += 1
            per_game_white[pair.source.game_id] += 1
            players[pair.source.white] += 1
        else:
            players[pair.source.black] += 1
    sources: Counter = Counter(game.source for game in games)
    white_counts = [per_game_white[game_id_of(g)] for g in games]
    mean_white = sum(white_counts) / len(white_counts) if white_counts else 0.0
    return CorpusStats(
        game_count=len(games),
        error_count=len(errors),
        pair_count=len(pairs),
        white_pair_count=white_pairs,
        unique_pair_count=len(seen_keys),
        mean_white_moves_per_game=mean_white,
        max_white_moves_per_game=max(white_counts) if white_counts else 0,
        move_histogram=move_hist,
        board_histogram=board_hist,
        player_move_counts=players,
        source_game_counts=sources,
    )


def write_stats_csvs(stats: CorpusStats, out_dir: str, top_k: int = 50) -> List[str]:
    os.makedirs(out_dir, exist_ok=True)
    written = []

    path = os.path.join(out_dir, "summary.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "value"])
        w.writerow(["games", stats.game_count])
        w.writerow(["skipped_games", stats.error_count])
        w.writerow(["pairs", stats.pair_count])
        w.writerow(["white_pairs", stats.white_pair_count])
        w.writerow(["unique_pairs", stats.unique_pair_count])
        w.writerow(["mean_white_moves_per_game", f"{stats.mean_white_moves_per_game:.2f}"])
        w.writerow(["max_white_moves_per_game", stats.max_white_moves_per_game])
    written.append(path)

    path = os.path.join(out_dir, "move_histogram.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "move", "count"])
        for rank, (move, count) in enumerate(stats.move_histogram.most_common(top_k), 1):
            w.writerow([rank, move, count])
    written.append(path)

    path = os.path.join(out_dir, "board_histogram.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "board", "count"])
        for rank, (board, count) in enumerate(stats.board_histogram.most_common(top_k), 1):
            w.writerow([rank, board, count])
    written.append(path)

    path = os.path.join(out_dir, "players.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["player", "moves"])
        for player, count in stats.player_move_counts.most_common():
            w.writerow([player, count])
    written.append(path)

    path = os.path.join(out_dir, "sources.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["source", "games"])
        for source, count in sorted(stats.source_game_counts.items()):
            w.writerow([source, count])
    written.append(path)
    return written


# -- pair record serialization ------------------------------------------------


def pair_to_record(pair: BoardMovePair) -> Dict:
    return {
        "board": pair.board_text,
        "move": pair.san,
        "fen": render_fen(pair.state),
        "mover": pair.mover,
        "game_id": pair.source.game_id,
        "ply": pair.source.ply,
        "white": pair.source.white,
        "black": pair.source.black,
        "source": pair.source.label,
    }


def write_pairs_ndjson(pairs: Iterable[BoardMovePair], path: str) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_record(pair), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_pair_records(path: str) -> List[Dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def ingest_run(
    in_dir: str,
    out_dir: str,
    side_filter: str = "white",
    dedupe: bool = False,
    stats_out: Optional[str] = None,
) -> Dict:
    """Full ingest pass over a directory of .pgn files.

    Writes pairs.ndjson and errors.ndjson into ``out_dir`` (plus stats CSVs
    when requested) and returns a summary dict.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = sorted(
        os.path.join(in_dir, name)
        for name in os.listdir(in_dir)
        if name.endswith(".pgn")
    )
    games: List[PgnGame] = []
    errors: List[PgnGameError] = []
    for path in paths:
        for item in parse_pgn_stream(path, source_label=os.path.basename(path)):
            if isinstance(item, PgnGame):
                games.append(item)
            else:
                errors.append(item)

    pairs = list(extract_pairs(games, side_filter=side_filter))
    if dedupe:
        pairs = list(dedupe_pairs(pairs))

    pairs_path = os.path.join(out_dir, "pairs.ndjson")
    write_pairs_ndjson(pairs, pairs_path)

    errors_path = os.path.join(out_dir, "errors.ndjson")
    with open(errors_path, "w", encoding="utf-8") as fh:
        for err in errors:
            fh.write(
                json.dumps(
                    {"source": err.source, "line": err.line, "message": err.message}
                )
                + "\n"
            )

    summary = {
        "files": len(paths),
        "games": len(games),
        "skipped_games": len(errors),
        "pairs": len(pairs),
        "pairs_path": pairs_path,
        "errors_path": errors_path,
    }
    if stats_out:
        stats = compute_stats(pairs, games, errors)
        summary["stats_files"] = write_stats_csvs(stats, stats_out)
        summary["mean_white_moves_per_game"] = stats.mean_white_moves_per_game
        summary["max_white_moves_per_game"] = stats.max_white_moves_per_game
    return summary
