"""Prompt template and per-family output truncation.

The bridge owns its copy of the instruction template.  The harness's copy
is the reference; the test suite asserts byte equality between the two on
shared fixtures, so any drift fails loudly instead of silently skewing
scores.

Truncation follows the one-rule-per-family convention: OPT-family models
are cut at the literal "### Response:" string, every other family at its
end-of-text marker (e.g. "<|endoftext|>").  In both cases the response is
*all text following* the delimiter.
"""

from __future__ import annotations

from typing import Optional

PROMPT_PREAMBLE = (
    "Below is an instruction that describes a task. "
    "Write a response that appropriately completes the request. "
    "### Instruction: "
)
RESPONSE_MARKER = "### Response:"

RULE_RESPONSE_MARKER = "response-marker"
RULE_END_OF_TEXT = "end-of-text"

# config.model_type values cut at RESPONSE_MARKER; everything else is cut
# at the tokenizer's end-of-text marker.
RESPONSE_MARKER_FAMILIES = ("opt",)

DEFAULT_END_OF_TEXT = "<|endoftext|>"


def render_prompt(instruction: str) -> str:
    """Inference-time prompt: template filled up to the response marker."""
    return f"{PROMPT_PREAMBLE}{instruction} {RESPONSE_MARKER}"


def render_training_text(instruction: str, output: str) -> str:
    """Training-time text: the prompt with the target appended."""
    return f"{render_prompt(instruction)} {output}"


def is_rendered(prompt: str) -> bool:
    """True when the harness already wrapped the instruction in the template."""
    return prompt.startswith(PROMPT_PREAMBLE)


def truncation_rule(model_type: str, eos_token: Optional[str]) -> tuple:
    """Map a model family to its (rule name, delimiter string)."""
    if model_type in RESPONSE_MARKER_FAMILIES:
        return RULE_RESPONSE_MARKER, RESPONSE_MARKER
    return RULE_END_OF_TEXT, eos_token or DEFAULT_END_OF_TEXT


def truncate_response(text: str, rule: str, marker: str, pad_token: Optional[str] = None) -> str:
    """Return the response part of a decoded generation.

    response-marker rule: all text following the first delimiter (the
    prompt itself ends with it, so this is exactly the continuation).

    end-of-text rule: the segment between the first delimiter and the
    next one; that first delimiter is the response separator the bridge
    inserted after the prompt, the next one is the model's own stop.
    Padding emitted by finished beams is scrubbed.

    No delimiter in the text means nothing follows it: empty string.
    """
    if rule == RULE_RESPONSE_MARKER:
        if marker not in text:
            return ""
        return text.split(marker, 1)[1].strip()
    parts = text.split(marker)
    if len(parts) < 2:
        return ""
    out = parts[1]
    if pad_token:
        out = out.replace(pad_token, "")
    return out.strip()
