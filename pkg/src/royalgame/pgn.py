"""Tolerant PGN reading.

parse_pgn_stream walks a file (or bytes/str) and yields PgnGame values for
games that replay legally from their start position, and PgnGameError
records for games that do not; the stream never aborts.  Comments, NAGs,
variations and decoration marks are discarded.  Input is decoded as UTF-8
with a Latin-1 fallback applied per line, which copes with mixed-encoding
archives.

A game whose result token is missing (end of file, or a new game starting
early) is accepted with result "*" rather than dropped; everything needed
for pair extraction is still there.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import IO, Iterator, List, Optional, Union

from .errors import NotationError, RoyalgameError
from .notation import parse_fen, parse_san
from .rules import GameState, apply_move

RESULTS = ("1-0", "0-1", "1/2-1/2", "*")

_TAG_RE = re.compile(r'^\s*\[\s*(\w+)\s+"((?:[^"\\]|\\.)*)"\s*\]\s*$')
_MOVE_NUMBER_RE = re.compile(r"^\d+\.*$")
_NAG_RE = re.compile(r"^\$\d+$")


@dataclass
class PgnGame:
    tags: dict
    moves: List[str]
    result: str
    line: int  # 1-based line of the first tag
    source: str = ""
    start_fen: Optional[str] = None

    def tag(self, name: str, default: str = "?") -> str:
        return self.tags.get(name, default)

    def start_state(self) -> GameState:
        if self.start_fen:
            return parse_fen(self.start_fen)
        return GameState.initial()


@dataclass
class PgnGameError:
    line: int
    message: str
    source: str = ""


def _decode_lines(data: bytes) -> List[str]:
    lines = []
    for raw in data.split(b"\n"):
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError:
            lines.append(raw.decode("latin-1"))
    return lines


def _unescape(value: str) -> str:
    return value.replace('\\"', '"').replace("\\\\", "\\")


def _tokenize_movetext(lines: List[str]) -> tuple:
    """Split accumulated movetext into SAN tokens.

    Returns (tokens, result, error_message).  Comments, NAG codes, move
    numbers, variations and !?-style decorations are dropped.
    """
    text = "\n".join(lines)
    tokens: List[str] = []
    result = None
    depth = 0
    in_comment = False
    word = []

    def flush():
        if word:
            tokens.append("".join(word))
            word.clear()

    i = 0
    while i < len(text):
        ch = text[i]
        if in_comment:
            if ch == "}":
                in_comment = False
            i += 1
            continue
        if ch == "{":
            flush()
            in_comment = True
            i += 1
            continue
        if ch == ";":
            flush()
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            flush()
            depth += 1
            i += 1
            continue
        if ch == ")":
            flush()
            if depth == 0:
                return tokens, result, "unbalanced variation parenthesis"
            depth -= 1
            i += 1
            continue
        if ch.isspace():
            flush()
            i += 1
            continue
        if depth == 0:
            word.append(ch)
        i += 1
    flush()
    if depth != 0:
        return tokens, result, "unbalanced variation parenthesis"

    clean: List[str] = []
    for tok in tokens:
        if tok in RESULTS:
            result = tok
            break  # anything after the result is ignored
        if _MOVE_NUMBER_RE.match(tok) or _NAG_RE.match(tok):
            continue
        tok = tok.rstrip("!?")
        if not tok:
            continue
        clean.append(tok)
    return clean, result, None


def _validate_replay(game: PgnGame) -> Optional[str]:
    try:
        state = game.start_state()
    except RoyalgameError as exc:
        return f"bad start position: {exc}"
    for ply, token in enumerate(game.moves, start=1):
        try:
            move = parse_san(state, token, strict=True)
        except NotationError as exc:
            return f"illegal move at ply {ply}: {token!r} ({exc})"
        state = apply_move(state, move)
    return None


def parse_pgn_stream(
    source: Union[str, bytes, IO],
    source_label: str = "",
    validate: bool = True,
) -> Iterator[Union[PgnGame, PgnGameError]]:
    """Yield games and per-game error records from PGN input.

    ``source`` may be a filesystem path, raw bytes, text, or a binary file
    object.  ``source_label`` tags every yielded record (stats use it to
    attribute games to their file).
    """
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, str):
        if os.path.exists(source):
            with open(source, "rb") as fh:
                data = fh.read()
            if not source_label:
                source_label = source
        else:
            data = source.encode("utf-8")
    else:
        data = source.read()
        if isinstance(data, str):
            data = data.encode("utf-8")

    lines = _decode_lines(data)

    tags: dict = {}
    movetext: List[str] = []
    game_line = 0
    state = "idle"  # idle | tags | moves

    def finish(end_reason_result: Optional[str]):
        tokens, result, err = _tokenize_movetext(movetext)
        if err is not None:
            return PgnGameError(game_line, err, source_label)
        if result is None:
            result = end_reason_result or "*"
        setup = tags.get("SetUp")
        start_fen = tags.get("FEN")
        if setup == "1" and not start_fen:
            return PgnGameError(game_line, "SetUp tag without FEN tag", source_label)
        game = PgnGame(
            tags=dict(tags),
            moves=tokens,
            result=result,
            line=game_line,
            source=source_label,
            start_fen=start_fen,
        )
        if validate:
            problem = _validate_replay(game)
            if problem is not None:
                return PgnGameError(game_line, problem, source_label)
        return game

    for lineno, line in enumerate(lines, start=1):
        if line.startswith("%"):  # PGN escape mechanism
            continue
        tag_match = _TAG_RE.match(line)
        if tag_match:
            if state == "moves":
                yield finish(None)
                tags, movetext = {}, []
                state = "idle"
            if state == "idle":
                game_line = lineno
                state = "tags"
            tags[tag_match.group(1)] = _unescape(tag_match.group(2))
            continue
        if line.strip():
            if state == "idle":
                game_line = lineno
            state = "moves"
            movetext.append(line)
        # blank lines only separate sections; game ends at its result token
        # or at the next game's first tag line

    if state != "idle":
        yield finish(None)


def read_games(path: str, validate: bool = True) -> tuple:
    """Convenience wrapper: all games and errors from one file."""
    games: List[PgnGame] = []
    errors: List[PgnGameError] = []
    for item in parse_pgn_stream(path, validate=validate):
        if isinstance(item, PgnGame):
            games.append(item)
        else:
            errors.append(item)
    return games, errors
