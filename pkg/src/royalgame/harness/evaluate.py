"""Driving endpoints over eval datasets and aggregating label counts.

Modes:
* single: one deterministic completion per instance (sample=false).
* retry:  sample with temperature until a legal move lands or the attempt
          budget (default 100) is spent; the last attempt's label is kept,
          so a report can show how often the budget ran out.

Instances whose endpoint call times out or breaks protocol are recorded as
errored and excluded from every percentage denominator.

report.json is fully deterministic for a deterministic endpoint: latencies
and timestamps live only in records.ndjson.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..cohorts import (
    BOARD_PREFIX,
    GOAL_SENTENCE,
    render_prompt,
)
from ..errors import EndpointTimeoutError, ProtocolViolationError, RoyalgameError
from ..notation import parse_fen, render_square_list, state_from_square_list
from ..rules import GameState
from .classify import (
    ALL_LABELS,
    LEGAL_LABELS,
    Classification,
    classify,
    extract_move,
)
from .protocol import Endpoint, GenRequest

# Reference lines for plots: the published tuned-model results this harness
# is meant to be compared against.  They are annotations, never assertions.
REFERENCE_LINES = (
    {
        "label": "125M-class model, 1e6-example tune, T=3.5",
        "metric": "pct_legal",
        "comparator": ">",
        "value": 99.0,
    },
    {
        "label": "125M-class model, 1e6-example tune, T=3.5",
        "metric": "pct_legal_check_or_mate",
        "comparator": "~",
        "value": 24.0,
    },
)


@dataclass
class EvalInstance:
    id: str
    instruction: str
    board: GameState

    @property
    def prompt(self) -> str:
        return render_prompt(self.instruction)


def _board_from_instruction(instruction: str) -> GameState:
    body = instruction
    if body.startswith(GOAL_SENTENCE + " "):
        body = body[len(GOAL_SENTENCE) + 1 :]
    if not body.startswith(BOARD_PREFIX):
        raise RoyalgameError(f"instruction does not carry a board: {instruction[:60]!r}")
    return state_from_square_list(body[len(BOARD_PREFIX) :])


def load_eval_dataset(path: str, goal_sentence: bool = True) -> List[EvalInstance]:
    """Read instances from NDJSON.

    Rows may carry a ready "instruction" (cohort test files) or a bare
    "fen"/"board" (puzzle sets); bare boards get the instruction rendered
    here.  Boards behind instructions are reconstructed from the square
    list, i.e. exactly what the model is judged against is what it saw.
    """
    from ..cohorts import render_instruction

    instances: List[EvalInstance] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            rid = str(row.get("id", f"r{lineno:06d}"))
            if "instruction" in row:
                instruction = row["instruction"]
                board = _board_from_instruction(instruction)
            elif "fen" in row:
                board = parse_fen(row["fen"])
                instruction = render_instruction(
                    render_square_list(board), goal_sentence=goal_sentence
                )
            elif "board" in row:
                board = state_from_square_list(row["board"])
                instruction = render_instruction(row["board"], goal_sentence=goal_sentence)
            else:
                raise RoyalgameError(f"{path}:{lineno}: no instruction, fen or board")
            instances.append(EvalInstance(id=rid, instruction=instruction, board=board))
    return instances


@dataclass(frozen=True)
class EvalConfig:
    mode: str = "single"  # single | retry
    temperature: float = 1.0
    max_retries: int = 100
    timeout: float = 10.0
    sample: Optional[bool] = None  # default: sample iff retry mode

    def __post_init__(self):
        if self.mode not in ("single", "retry"):
            raise ValueError(f"mode must be single or retry, got {self.mode!r}")
        if self.max_retries < 1:
            raise ValueError("max_retries must be at least 1")

    @property
    def effective_sample(self) -> bool:
        return self.mode == "retry" if self.sample is None else self.sample

    @property
    def max_attempts(self) -> int:
        return self.max_retries if self.mode == "retry" else 1


@dataclass
class EvalRecord:
    instance_id: str
    label: str
    token: Optional[str]
    raw_text: Optional[str]
    attempts: int
    would_check: bool
    would_mate: bool
    error: Optional[str] = None
    latency_s: float = 0.0

    def to_row(self) -> Dict:
        return asdict(self)


def evaluate_instance(
    endpoint: Endpoint, instance: EvalInstance, config: EvalConfig
) -> EvalRecord:
    prompt = instance.instruction if endpoint.applies_template else instance.prompt
    started = time.perf_counter()
    result: Optional[Classification] = None
    raw: Optional[str] = None
    attempts = 0
    for attempt in range(1, config.max_attempts + 1):
        attempts = attempt
        request = GenRequest(
            id=f"{instance.id}#{attempt}",
            prompt=prompt,
            temperature=config.temperature,
            sample=config.effective_sample,
        )
        try:
            raw = endpoint.generate(request)
        except (EndpointTimeoutError, ProtocolViolationError) as exc:
            return EvalRecord(
                instance_id=instance.id,
                label="errored",
                token=None,
                raw_text=None,
                attempts=attempt,
                would_check=False,
                would_mate=False,
                error=f"{type(exc).__name__}: {exc}",
                latency_s=round(time.perf_counter() - started, 6),
            )
        result = classify(instance.board, extract_move(raw))
        if result.is_legal:
            break
    assert result is not None
    return EvalRecord(
        instance_id=instance.id,
        label=result.label,
        token=result.token,
        raw_text=raw,
        attempts=attempts,
        would_check=result.would_check,
        would_mate=result.would_mate,
        latency_s=round(time.perf_counter() - started, 6),
    )


@dataclass
class MetricsReport:
    dataset: Dict
    endpoint: Dict
    config: Dict
    attempted: int
    errored: int
    counts: Dict[str, int]
    percentages: Dict[str, float]
    aggregate: Dict[str, float]
    reference_lines: Tuple = REFERENCE_LINES

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


def _aggregate(records: Sequence[EvalRecord]) -> Tuple[int, int, Dict, Dict, Dict]:
    scored = [r for r in records if r.error is None]
    errored = len(records) - len(scored)
    counts = {label: 0 for label in ALL_LABELS}
    for r in scored:
        counts[r.label] += 1
    n = len(scored)

    def pct(x: int) -> float:
        return round(100.0 * x / n, 4) if n else 0.0

    percentages = {label: pct(c) for label, c in counts.items()}
    legal = sum(counts[label] for label in LEGAL_LABELS)
    check_or_mate = counts["legal-and-check"] + counts["legal-and-mate"]
    illegal_would_mate = sum(
        1 for r in scored if r.label == "illegal" and r.would_mate
    )
    absent_would_mate = sum(
        1 for r in scored if r.label == "piece-not-on-board" and r.would_mate
    )
    aggregate = {
        "pct_legal": pct(legal),
        "pct_legal_check_or_mate": pct(check_or_mate),
        "pct_illegal_would_mate": pct(illegal_would_mate),
        "pct_absent_would_mate": pct(absent_would_mate),
        "mean_attempts": round(sum(r.attempts for r in scored) / n, 4) if n else 0.0,
    }
    return n, errored, counts, percentages, aggregate


def evaluate(
    instances: Sequence[EvalInstance],
    endpoint: Endpoint,
    config: EvalConfig,
    out_dir: Optional[str] = None,
    dataset_info: Optional[Dict] = None,
) -> Tuple[MetricsReport, List[EvalRecord]]:
    """Run the whole dataset and (optionally) persist the three artifacts."""
    records = [evaluate_instance(endpoint, inst, config) for inst in instances]
    records.sort(key=lambda r: r.instance_id)
    n, errored, counts, percentages, aggregate = _aggregate(records)
    report = MetricsReport(
        dataset=dataset_info or {"instances": len(instances)},
        endpoint={"spec": endpoint.spec, "hello": endpoint.server_hello},
        config={
            "mode": config.mode,
            "temperature": config.temperature,
            "max_retries": config.max_retries,
            "timeout": config.timeout,
            "sample": config.effective_sample,
        },
        attempted=n,
        errored=errored,
        counts=counts,
        percentages=percentages,
        aggregate=aggregate,
    )
    if out_dir:
        write_eval_artifacts(report, records, out_dir)
    return report, records


def write_eval_artifacts(
    report: MetricsReport, records: Sequence[EvalRecord], out_dir: str
) -> Dict[str, str]:
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    report_path = os.path.join(out_dir, "report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    paths["report"] = report_path

    records_path = os.path.join(out_dir, "records.ndjson")
    with open(records_path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(r.to_row(), ensure_ascii=False) + "\n")
    paths["records"] = records_path

    plot_path = os.path.join(out_dir, "plotdata.csv")
    with open(plot_path, "w", encoding="utf-8") as fh:
        fh.write("metric,value\n")
        for label, value in sorted(report.percentages.items()):
            fh.write(f"pct_{label},{value}\n")
        for key, value in sorted(report.aggregate.items()):
            fh.write(f"{key},{value}\n")
    paths["plotdata"] = plot_path
    return paths


def dataset_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def sweep_temperature(
    instances: Sequence[EvalInstance],
    endpoint: Endpoint,
    temperatures: Sequence[float],
    out_dir: Optional[str] = None,
    max_retries: int = 1,
) -> List[Dict]:
    """Single-shot sampled eval per temperature; returns plot rows.

    The published plateau values ride along as ref_ columns so plots can
    draw their reference lines without a join.
    """
    rows: List[Dict] = []
    for temp in temperatures:
        config = EvalConfig(
            mode="single" if max_retries == 1 else "retry",
            temperature=temp,
            max_retries=max_retries,
            sample=True,
        )
        report, _ = evaluate(instances, endpoint, config)
        rows.append(
            {
                "temperature": temp,
                "attempted": report.attempted,
                "errored": report.errored,
                "pct_legal": report.aggregate["pct_legal"],
                "pct_legal_check_or_mate": report.aggregate["pct_legal_check_or_mate"],
                "ref_pct_legal": 99.0,
                "ref_pct_legal_check_or_mate": 24.0,
            }
        )
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, "sweep.csv")
        with open(path, "w", encoding="utf-8") as fh:
            header = (
                "temperature,attempted,errored,pct_legal,pct_legal_check_or_mate,"
                "ref_pct_legal,ref_pct_legal_check_or_mate"
            )
            fh.write(header + "\n")
            for row in rows:
                fh.write(
                    f"{row['temperature']},{row['attempted']},{row['errored']},"
                    f"{row['pct_legal']},{row['pct_legal_check_or_mate']},"
                    f"{row['ref_pct_legal']},{row['ref_pct_legal_check_or_mate']}\n"
                )
    return rows
