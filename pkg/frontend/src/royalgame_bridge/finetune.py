"""Full-parameter fine-tuning on emitted cohorts.

The cohort file is the builder's JSON contract: records with string
"instruction", "input" and "output" fields, as a JSON array or NDJSON.
Training text is the inference prompt plus the target; the loss is taken
on the response tokens only (the prompt is masked), and every parameter
trains — no frozen layers, no adapters.

For end-of-text-family models the family delimiter is inserted between
prompt and response, matching exactly what serving expects to cut at.

A sidecar manifest (tuning_manifest.json) records the settings, the
cohort digest, and the published reference points the run can be compared
against; the reference points are annotations, never assertions.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
from typing import Dict, List, Optional

from .errors import DataContractError
from .modeling import LoadedModel, load_model
from .settings import TuningSettings
from .template import RULE_END_OF_TEXT, render_prompt

log = logging.getLogger("royalgame_bridge")

MANIFEST_NAME = "tuning_manifest.json"

# Published results for tuned models on unique cohorts, kept with every
# tuning run for orientation.  Comparison lines, not targets.
REFERENCE_POINTS = (
    {"cohort": "unique-1000", "metric": "pct_legal", "value": 29.0},
    {"cohort": "unique-10000", "metric": "pct_legal", "value": 36.0},
)

REQUIRED_FIELDS = ("instruction", "input", "output")


def read_cohort(path: str) -> List[Dict]:
    """Load cohort records, enforcing the builder's contract."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DataContractError(f"cannot read cohort file {path!r}: {exc}") from exc

    if text.lstrip().startswith("["):
        try:
            rows = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DataContractError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(rows, list):
            raise DataContractError(f"{path}: expected a JSON array of records")
    else:
        rows = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line:
                continue
            try:
                rows.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise DataContractError(f"{path}:{lineno}: not valid JSON: {exc}") from exc

    if not rows:
        raise DataContractError(f"{path}: cohort file has no records")
    for index, row in enumerate(rows, start=1):
        if not isinstance(row, dict):
            raise DataContractError(f"{path}: record {index} is not an object")
        for key in REQUIRED_FIELDS:
            if not isinstance(row.get(key), str):
                raise DataContractError(
                    f"{path}: record {index} lacks string field {key!r}"
                )
        if not row["output"]:
            raise DataContractError(f"{path}: record {index} has an empty output")
    return rows


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _training_pair(loaded: LoadedModel, instruction: str, output: str) -> tuple:
    """(prompt part, full text) for one record, per the model family."""
    prompt = render_prompt(instruction)
    eos = loaded.tokenizer.eos_token or ""
    if loaded.rule == RULE_END_OF_TEXT:
        prompt = prompt + loaded.marker
    return prompt, f"{prompt} {output}{eos}"


def finetune(
    base_model_id: str,
    data_path: str,
    settings: Optional[TuningSettings] = None,
    out_dir: str = "tuned-model",
    log_every: int = 100,
) -> str:
    """Tune every parameter of the base model on a cohort; returns out_dir."""
    import torch

    settings = settings or TuningSettings()
    rows = read_cohort(data_path)
    loaded = load_model(base_model_id)
    model, tokenizer = loaded.model, loaded.tokenizer
    pad_id = (
        tokenizer.pad_token_id
        if tokenizer.pad_token_id is not None
        else tokenizer.eos_token_id
    )

    examples = []
    for row in rows:
        prompt, full = _training_pair(loaded, row["instruction"], row["output"])
        prompt_len = len(tokenizer(prompt)["input_ids"])
        ids = tokenizer(full)["input_ids"]
        examples.append((ids, prompt_len))

    torch.manual_seed(settings.seed)
    order_rng = random.Random(settings.seed)
    optimizer = torch.optim.AdamW(model.parameters(), lr=settings.learning_rate)

    losses: List[float] = []
    steps = 0
    model.train()
    for epoch in range(settings.epochs):
        indices = list(range(len(examples)))
        order_rng.shuffle(indices)
        for start in range(0, len(indices), settings.batch_size):
            batch = [examples[i] for i in indices[start : start + settings.batch_size]]
            width = max(len(ids) for ids, _ in batch)
            input_ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
            attention = torch.zeros((len(batch), width), dtype=torch.long)
            labels = torch.full((len(batch), width), -100, dtype=torch.long)
            for i, (ids, prompt_len) in enumerate(batch):
                seq = torch.tensor(ids, dtype=torch.long)
                input_ids[i, : len(ids)] = seq
                attention[i, : len(ids)] = 1
                labels[i, prompt_len : len(ids)] = seq[prompt_len:]
            out = model(input_ids=input_ids, attention_mask=attention, labels=labels)
            out.loss.backward()
            optimizer.step()
            optimizer.zero_grad()
            losses.append(float(out.loss.detach()))
            steps += 1
            if log_every and steps % log_every == 0:
                recent = losses[-log_every:]
                log.info(
                    "epoch %d step %d loss %.4f",
                    epoch + 1,
                    steps,
                    sum(recent) / len(recent),
                )
    model.eval()

    os.makedirs(out_dir, exist_ok=True)
    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)

    tail = losses[-10:]
    manifest = {
        "base_model": base_model_id,
        "data_path": os.path.abspath(data_path),
        "data_sha256": _sha256_file(data_path),
        "settings": settings.to_manifest(),
        "examples": len(examples),
        "steps": steps,
        "initial_loss": losses[0] if losses else None,
        "final_loss": (sum(tail) / len(tail)) if tail else None,
        "family": loaded.family,
        "truncation": loaded.rule,
        "reference_points": list(REFERENCE_POINTS),
    }
    with open(os.path.join(out_dir, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    log.info(
        "saved tuned model to %s (%d examples, %d steps, final loss %s)",
        out_dir,
        len(examples),
        steps,
        f"{manifest['final_loss']:.4f}" if manifest["final_loss"] is not None else "n/a",
    )
    return out_dir
