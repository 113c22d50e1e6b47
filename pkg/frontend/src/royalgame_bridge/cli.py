"""bridge: serve checkpoints on the wire protocol, or fine-tune them.

    bridge serve --model <dir> [--beams 2 --rep-penalty 1.3 ...]
    bridge finetune --model <dir> --data cohort.json --out <dir> \
        [--lr 2e-4 --bs 4 --epochs 3 --seed 41]
    bridge make-tiny --out <dir> [--family opt|neo --seed 17]

stdout of `serve` carries only protocol rows; all logging goes to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from . import __version__
from .errors import BridgeError
from .settings import GenerationSettings, TuningSettings


def _cmd_serve(args) -> int:
    from .serve import BridgeServer, serve_stdio

    settings = GenerationSettings(
        beams=args.beams,
        repetition_penalty=args.rep_penalty,
        sampling=args.sample,
        temperature=args.temperature,
        early_stopping=not args.no_early_stopping,
        max_generation_seconds=args.max_seconds,
        length_penalty=args.length_penalty,
        max_new_tokens=args.max_new_tokens,
    )
    server = BridgeServer(args.model, settings, name=args.name)
    serve_stdio(server)
    return 0


def _cmd_finetune(args) -> int:
    from .finetune import finetune

    settings = TuningSettings(
        learning_rate=args.lr,
        batch_size=args.bs,
        epochs=args.epochs,
        seed=args.seed,
        data_path=args.data,
    )
    out = finetune(args.model, args.data, settings, out_dir=args.out)
    print(f"tuned model written to {out}")
    return 0


def _cmd_make_tiny(args) -> int:
    from .modeling import build_tiny_model

    out = build_tiny_model(
        args.out,
        family=args.family,
        seed=args.seed,
        vocab_size=args.vocab,
        hidden_size=args.hidden,
        layers=args.layers,
        heads=args.heads,
    )
    print(f"tiny {args.family} model written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridge",
        description="serve and fine-tune causal LMs for the move-prediction protocol",
    )
    parser.add_argument(
        "--version", action="version", version=f"bridge {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="answer protocol requests over stdio")
    p.add_argument("--model", required=True, help="checkpoint directory or model id")
    p.add_argument("--name", default="bridge")
    p.add_argument("--beams", type=int, default=2)
    p.add_argument("--rep-penalty", type=float, default=1.3, dest="rep_penalty")
    p.add_argument("--sample", action="store_true", help="sample by default")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--no-early-stopping", action="store_true")
    p.add_argument("--max-seconds", type=float, default=10.0, dest="max_seconds")
    p.add_argument("--length-penalty", type=float, default=0.4, dest="length_penalty")
    p.add_argument("--max-new-tokens", type=int, default=16, dest="max_new_tokens")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("finetune", help="full-parameter tune on a cohort file")
    p.add_argument("--model", required=True, help="base checkpoint directory or id")
    p.add_argument("--data", required=True, help="cohort file (.json or .ndjson)")
    p.add_argument("--out", required=True, help="output checkpoint directory")
    p.add_argument("--lr", type=float, default=2e-4)
    p.add_argument("--bs", type=int, default=4)
    p.add_argument("--epochs", type=int, default=3)
    p.add_argument("--seed", type=int, default=41)
    p.set_defaults(func=_cmd_finetune)

    p = sub.add_parser("make-tiny", help="build a tiny random checkpoint locally")
    p.add_argument("--out", required=True)
    p.add_argument("--family", choices=("opt", "neo"), default="opt")
    p.add_argument("--seed", type=int, default=17)
    p.add_argument("--vocab", type=int, default=1024)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--layers", type=int, default=4)
    p.add_argument("--heads", type=int, default=4)
    p.set_defaults(func=_cmd_make_tiny)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (BridgeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
