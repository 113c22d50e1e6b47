"""Model loading and tiny offline stand-ins.

`load_model` resolves a local checkpoint directory (or hub id, when a hub
is reachable) to a model + tokenizer and decides the truncation rule from
the model family, logging which rule applies.

`build_tiny_model` constructs a small randomly-initialized causal LM with
a byte-level BPE tokenizer trained on chess-shaped text, saved in the
standard checkpoint layout.  It exists because this environment has no
model hub: the tiny models stand in for the 28M/125M-class checkpoints in
tests and demos, and exercise exactly the same loading, serving, tuning
and truncation paths.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

from .errors import ModelLoadError
from .template import truncation_rule

log = logging.getLogger("royalgame_bridge")

OPT_FAMILY = "opt"
NEO_FAMILY = "neo"
TINY_FAMILIES = (OPT_FAMILY, NEO_FAMILY)


@dataclass
class LoadedModel:
    model_id: str
    model: object
    tokenizer: object
    family: str
    rule: str
    marker: str

    @property
    def pad_token(self) -> Optional[str]:
        return getattr(self.tokenizer, "pad_token", None)


def _quiet_transformers() -> None:
    from transformers.utils import logging as hf_logging

    hf_logging.disable_progress_bar()


def load_model(model_id: str) -> LoadedModel:
    """Load a causal LM checkpoint; raises ModelLoadError when impossible."""
    _quiet_transformers()
    from transformers import AutoModelForCausalLM, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForCausalLM.from_pretrained(model_id)
    except Exception as exc:  # anything from missing dirs to bad weights
        raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
    model.eval()
    family = getattr(model.config, "model_type", "unknown")
    rule, marker = truncation_rule(family, tokenizer.eos_token)
    n_params = sum(p.numel() for p in model.parameters())
    log.info(
        "loaded %s: family %r, %d parameters; truncation rule: %s (%r)",
        model_id,
        family,
        n_params,
        rule,
        marker,
    )
    return LoadedModel(
        model_id=model_id,
        model=model,
        tokenizer=tokenizer,
        family=family,
        rule=rule,
        marker=marker,
    )


def _vocabulary_text() -> list:
    """Deterministic chess-shaped text the tiny tokenizer is trained on.

    Coverage, not realism, is the goal: template sentences, SAN move
    shapes, square-list boards.  Byte-level BPE falls back to bytes for
    anything unseen, so nothing is ever untokenizable.
    """
    from .template import render_training_text

    files = "abcdefgh"
    ranks = "12345678"
    pieces = "KQRBN"
    squares = [f + r for f in files for r in ranks]
    moves = []
    moves.extend(squares)  # pawn pushes
    moves.extend(f"{p}{s}" for p in pieces for s in squares)
    moves.extend(f"{p}x{s}" for p in pieces for s in squares[::3])
    moves.extend(f"{f}x{s}" for f in files for s in squares[::7])
    moves.extend(f"{s}=Q" for s in squares if s[1] in "18")
    moves.extend(["O-O", "O-O-O", "e8=N#", "Qh5+", "Rxd8#", "exd6"])
    board = ", ".join(
        f"{sq}:{pc}" for sq, pc in zip(squares[::2], "KQRBNPkqrbnp" * 3)
    )
    instruction = (
        "You are a chess Grandmaster and checkmate # is your goal. "
        f"Predict the next best move on this SAN chess board: {board}"
    )
    lines = [render_training_text(instruction, m) for m in moves[:64]]
    lines.append(" ".join(moves))
    lines.append(board)
    return lines


def _build_tokenizer(vocab_size: int, eos_token: str, pad_token: str):
    from tokenizers import Tokenizer, decoders, models, pre_tokenizers, trainers
    from transformers import PreTrainedTokenizerFast

    tok = Tokenizer(models.BPE(unk_token=None))
    tok.pre_tokenizer = pre_tokenizers.ByteLevel(add_prefix_space=False)
    tok.decoder = decoders.ByteLevel()
    trainer = trainers.BpeTrainer(
        vocab_size=vocab_size,
        special_tokens=[eos_token, pad_token],
        initial_alphabet=pre_tokenizers.ByteLevel.alphabet(),
    )
    tok.train_from_iterator(_vocabulary_text(), trainer)
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, eos_token=eos_token, pad_token=pad_token
    )


def build_tiny_model(
    out_dir: str,
    family: str = OPT_FAMILY,
    seed: int = 17,
    vocab_size: int = 1024,
    hidden_size: int = 128,
    layers: int = 4,
    heads: int = 4,
) -> str:
    """Create and save a tiny randomly-initialized causal LM; returns out_dir.

    family "opt" uses the OPT architecture (response-marker truncation);
    family "neo" uses GPT-Neo with an "<|endoftext|>" end-of-text marker,
    the architecture of the small-stories model line.
    """
    _quiet_transformers()
    import torch

    if family not in TINY_FAMILIES:
        raise ModelLoadError(f"unknown tiny family {family!r}; pick from {TINY_FAMILIES}")

    torch.manual_seed(seed)
    if family == OPT_FAMILY:
        from transformers import OPTConfig, OPTForCausalLM

        tokenizer = _build_tokenizer(vocab_size, eos_token="</s>", pad_token="<pad>")
        config = OPTConfig(
            vocab_size=len(tokenizer),
            hidden_size=hidden_size,
            num_hidden_layers=layers,
            num_attention_heads=heads,
            ffn_dim=hidden_size * 4,
            max_position_embeddings=512,
            dropout=0.0,
            attention_dropout=0.0,
            eos_token_id=tokenizer.eos_token_id,
            pad_token_id=tokenizer.pad_token_id,
            bos_token_id=tokenizer.eos_token_id,
            word_embed_proj_dim=hidden_size,
        )
        model = OPTForCausalLM(config)
    else:
        from transformers import GPTNeoConfig, GPTNeoForCausalLM

        tokenizer = _build_tokenizer(
            vocab_size, eos_token="<|endoftext|>", pad_token="<pad>"
        )
        config = GPTNeoConfig(
            vocab_size=len(tokenizer),
            hidden_size=hidden_size,
            num_layers=layers,
            num_heads=heads,
            intermediate_size=hidden_size * 4,
            max_position_embeddings=512,
            attention_types=[[["global"], layers]],
            embed_dropout=0.0,
            attention_dropout=0.0,
            resid_dropout=0.0,
            eos_token_id=tokenizer.eos_token_id,
            pad_token_id=tokenizer.pad_token_id,
            bos_token_id=tokenizer.eos_token_id,
        )
        model = GPTNeoForCausalLM(config)

    model.save_pretrained(out_dir)
    tokenizer.save_pretrained(out_dir)
    n_params = sum(p.numel() for p in model.parameters())
    log.info("built tiny %s model (%d parameters) at %s", family, n_params, out_dir)
    return out_dir
