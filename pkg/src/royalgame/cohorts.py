"""Building instruction-tuning cohorts from a pair pool.

A cohort is a seed-deterministic sample (without replacement) from the pair
pool, split into disjoint train and test sets, rendered into alpaca-style
records: {"instruction": ..., "input": "", "output": ...}.  The instruction
carries the board as a square list, optionally prefixed by the goal
sentence; the goal flag changes the instruction prefix and nothing else, so
a goal and a no-goal cohort built from the same seed hold the same
underlying pairs line for line.

Because square-list boards drop en-passant and side/castling context, a
pair whose move is only legal with that context (in practice: en-passant
captures) would teach the model a move that is illegal on the board it is
shown.  Such pairs are filtered out before sampling and counted in the
manifest.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (
    InsufficientPoolError,
    NotationError,
    RoyalgameError,
    SeedMissingError,
)
from .notation import parse_san, state_from_square_list

GOAL_SENTENCE = "You are a chess Grandmaster and checkmate # is your goal."
BOARD_PREFIX = "Predict the next best move on this SAN chess board: "

PROMPT_PREAMBLE = (
    "Below is an instruction that describes a task. "
    "Write a response that appropriately completes the request. "
    "### Instruction: "
)
RESPONSE_MARKER = "### Response:"

TEMPLATE_VERSION = "1"
SAMPLER = "random.Random (MT19937), sample without replacement"

DEFAULT_SEED = 41
DEFAULT_TEST_SIZE = 10_000


def render_instruction(board_text: str, goal_sentence: bool = True) -> str:
    prefix = GOAL_SENTENCE + " " if goal_sentence else ""
    return f"{prefix}{BOARD_PREFIX}{board_text}"


def render_prompt(instruction: str) -> str:
    """Inference-time prompt: template filled up to the response marker."""
    return f"{PROMPT_PREAMBLE}{instruction} {RESPONSE_MARKER}"


def render_training_text(instruction: str, output: str) -> str:
    """Training-time text: the prompt with the target appended."""
    return f"{render_prompt(instruction)} {output}"


@dataclass(frozen=True)
class CohortSpec:
    name: str
    size: int
    seed: Optional[int] = DEFAULT_SEED
    test_size: int = DEFAULT_TEST_SIZE
    goal_sentence: bool = True

    def require_seed(self) -> int:
        if self.seed is None:
            raise SeedMissingError(f"cohort {self.name!r} has no seed")
        return self.seed


@dataclass
class CohortManifest:
    name: str
    size: int
    test_size: int
    seed: int
    goal_sentence: bool
    sampler: str
    template_version: str
    pool_digest: str
    pool_records: int
    eligible_records: int
    skipped_ineligible: int
    files: Dict[str, str]  # filename -> sha256
    train_ids: List[str] = field(default_factory=list)
    test_ids: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def record_id(record: Dict) -> str:
    """Stable identity of a pool record: game and ply when known, else content."""
    if "game_id" in record and "ply" in record:
        return f"{record['game_id']}:{record['ply']}"
    return sha256_text(record["board"] + "|" + record["move"])[:16]


def pair_is_teachable(record: Dict) -> bool:
    """True when the move stays legal on the board as the model will see it."""
    try:
        state = state_from_square_list(record["board"])
        parse_san(state, record["move"], strict=False)
        return True
    except RoyalgameError:
        return False


def eligible_records(pool: Sequence[Dict]) -> Tuple[List[Dict], int]:
    keep = []
    skipped = 0
    for record in pool:
        if pair_is_teachable(record):
            keep.append(record)
        else:
            skipped += 1
    return keep, skipped


def _instruction_record(record: Dict, goal: bool) -> Dict:
    return {
        "instruction": render_instruction(record["board"], goal_sentence=goal),
        "input": "",
        "output": record["move"],
    }


def _write_ndjson(path: str, rows: Iterable[Dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def _write_array(path: str, rows: List[Dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(rows, fh, ensure_ascii=False, indent=1)
        fh.write("\n")


def build_cohort(
    pool: Sequence[Dict],
    spec: CohortSpec,
    out_dir: str,
    pool_digest: str = "",
) -> CohortManifest:
    """Sample, render and write one cohort; returns its manifest.

    Writes train.ndjson/test.ndjson plus single-array train.json/test.json
    and manifest.json into ``out_dir``.  Raises InsufficientPoolError when
    the eligible pool cannot cover size + test_size.
    """
    seed = spec.require_seed()
    eligible, skipped = eligible_records(pool)
    need = spec.size + spec.test_size
    if need > len(eligible):
        raise InsufficientPoolError(
            f"need {need} records (size {spec.size} + test {spec.test_size}), "
            f"eligible pool has {len(eligible)}"
        )

    rng = random.Random(seed)
    chosen = rng.sample(range(len(eligible)), need)
    train_records = [eligible[i] for i in chosen[: spec.size]]
    test_records = [eligible[i] for i in chosen[spec.size :]]

    os.makedirs(out_dir, exist_ok=True)
    files = {}
    for split, records in (("train", train_records), ("test", test_records)):
        rows = [_instruction_record(r, spec.goal_sentence) for r in records]
        ndjson_path = os.path.join(out_dir, f"{split}.ndjson")
        _write_ndjson(ndjson_path, rows)
        files[f"{split}.ndjson"] = sha256_file(ndjson_path)
        array_path = os.path.join(out_dir, f"{split}.json")
        _write_array(array_path, rows)
        files[f"{split}.json"] = sha256_file(array_path)

    manifest = CohortManifest(
        name=spec.name,
        size=spec.size,
        test_size=spec.test_size,
        seed=seed,
        goal_sentence=spec.goal_sentence,
        sampler=SAMPLER,
        template_version=TEMPLATE_VERSION,
        pool_digest=pool_digest,
        pool_records=len(pool),
        eligible_records=len(eligible),
        skipped_ineligible=skipped,
        files=files,
        train_ids=[record_id(r) for r in train_records],
        test_ids=[record_id(r) for r in test_records],
    )
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(manifest.to_json() + "\n")
    return manifest


def build_cohort_ladder(
    pool: Sequence[Dict],
    sizes: Sequence[int],
    out_root: str,
    seed: int = DEFAULT_SEED,
    test_size: int = DEFAULT_TEST_SIZE,
    goal_sentence: bool = True,
    pool_digest: str = "",
) -> List[CohortManifest]:
    """Build one cohort per requested size under out_root/<size>/.

    When the pool is too small for a rung, the rung is shrunk to what is
    available (with a warning in the returned manifest name ordering left
    intact) rather than failing the whole ladder.
    """
    eligible_count = len(eligible_records(pool)[0])
    manifests = []
    for size in sizes:
        actual = size
        available = eligible_count - test_size
        if available <= 0:
            raise InsufficientPoolError(
                f"eligible pool ({eligible_count}) cannot even cover the test split ({test_size})"
            )
        if actual > available:
            actual = available
        tag = "goal" if goal_sentence else "nogoal"
        spec = CohortSpec(
            name=f"{tag}-{size}",
            size=actual,
            seed=seed,
            test_size=test_size,
            goal_sentence=goal_sentence,
        )
        out_dir = os.path.join(out_root, f"{tag}-{size}")
        manifests.append(build_cohort(pool, spec, out_dir, pool_digest=pool_digest))
    return manifests


# -- validation ----------------------------------------------------------------


LEGALITY_VIOLATIONS = (
    "unparseable-token",
    "piece-absent",
    "no-matching-legal-move",
    "ambiguous-token",
    "bad-board",
    "bad-json",
    "missing-field",
)


@dataclass
class LintReport:
    records_checked: int
    violations: List[Dict]
    warnings: List[Dict]
    duplicate_rate: float
    piece_count_histogram: Dict[int, int]

    @property
    def legality_failures(self) -> int:
        return sum(1 for v in self.violations if v["kind"] in LEGALITY_VIOLATIONS)

    def ok(self) -> bool:
        return not self.violations


def _violation_kind(exc: RoyalgameError) -> str:
    from .errors import (
        AmbiguousTokenError,
        NoMatchingLegalMoveError,
        PieceAbsentError,
        UnparseableTokenError,
    )

    if isinstance(exc, UnparseableTokenError):
        return "unparseable-token"
    if isinstance(exc, PieceAbsentError):
        return "piece-absent"
    if isinstance(exc, AmbiguousTokenError):
        return "ambiguous-token"
    if isinstance(exc, NoMatchingLegalMoveError):
        return "no-matching-legal-move"
    return "bad-board"


def validate_cohort(path: str) -> LintReport:
    """Re-parse one cohort file and lint every record.

    Accepts both shapes the builder writes: NDJSON (one object per line)
    and a single JSON array (the fine-tuning ``.json`` contract).  For
    array files the ``line`` field of a violation is the 1-based row index.

    Checks: JSON shape, instruction template, board parseability, output
    legality on the reconstructed board.  Duplicate (instruction, output)
    rows and empty instructions are warnings, not violations.
    """
    violations: List[Dict] = []
    warnings: List[Dict] = []
    seen: Dict[Tuple[str, str], int] = {}
    piece_counts: Dict[int, int] = {}
    n = 0

    def lint_row(lineno: int, row) -> None:
        if not isinstance(row, dict):
            violations.append(
                {
                    "line": lineno,
                    "kind": "bad-json",
                    "detail": f"expected object, got {type(row).__name__}",
                }
            )
            return
        missing = [k for k in ("instruction", "input", "output") if k not in row]
        if missing:
            violations.append(
                {"line": lineno, "kind": "missing-field", "detail": ",".join(missing)}
            )
            return
        instruction = row["instruction"]
        output = row["output"]
        key = (instruction, output)
        seen[key] = seen.get(key, 0) + 1

        if not instruction:
            warnings.append({"line": lineno, "kind": "empty-instruction", "detail": ""})
            return

        body = instruction
        if body.startswith(GOAL_SENTENCE + " "):
            body = body[len(GOAL_SENTENCE) + 1 :]
        if not body.startswith(BOARD_PREFIX):
            violations.append({"line": lineno, "kind": "bad-template", "detail": body[:60]})
            return
        board_text = body[len(BOARD_PREFIX) :]
        try:
            state = state_from_square_list(board_text, strict=True)
        except RoyalgameError as exc:
            violations.append({"line": lineno, "kind": "bad-board", "detail": str(exc)})
            return
        count = len(state.placement)
        piece_counts[count] = piece_counts.get(count, 0) + 1
        try:
            parse_san(state, output, strict=False)  # success proves legality
        except NotationError as exc:
            violations.append(
                {"line": lineno, "kind": _violation_kind(exc), "detail": output}
            )

    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()

    if text.lstrip().startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            rows = []
            violations.append({"line": 1, "kind": "bad-json", "detail": str(exc)})
        for index, row in enumerate(rows, start=1):
            n += 1
            lint_row(index, row)
    else:
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            n += 1
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                violations.append({"line": lineno, "kind": "bad-json", "detail": str(exc)})
                continue
            lint_row(lineno, row)

    duplicates = sum(c - 1 for c in seen.values())
    duplicate_rate = duplicates / n if n else 0.0
    return LintReport(
        records_checked=n,
        violations=violations,
        warnings=warnings,
        duplicate_rate=duplicate_rate,
        piece_count_histogram=dict(sorted(piece_counts.items())),
    )
