"""The royalgame command line.

Subcommands mirror the pipeline stages plus serving and probing utilities;
run ``royalgame <subcommand> -h`` for details.  Exit status is nonzero on
stage failure or lint violations, so shells and CI can gate on it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from . import PROTOCOL_VERSION, __version__
from .errors import RoyalgameError


def _cmd_ingest(args) -> int:
    from .ingest import ingest_run

    summary = ingest_run(
        args.in_dir,
        args.out,
        side_filter=args.filter,
        dedupe=args.dedupe,
        stats_out=args.stats_out,
    )
    print(
        f"{summary['games']} games ({summary['skipped_games']} skipped), "
        f"{summary['pairs']} pairs -> {summary['pairs_path']}"
    )
    return 0


def _cmd_build_cohorts(args) -> int:
    from .cohorts import build_cohort_ladder, sha256_file
    from .ingest import read_pair_records

    pool = read_pair_records(args.pool)
    sizes = [int(s) for s in args.sizes.split(",") if s]
    variants = [not args.no_goal]
    if args.both:
        variants = [True, False]
    for goal in variants:
        manifests = build_cohort_ladder(
            pool,
            sizes=sizes,
            out_root=args.out,
            seed=args.seed,
            test_size=args.test_size,
            goal_sentence=goal,
            pool_digest=sha256_file(args.pool),
        )
        for manifest in manifests:
            print(
                f"cohort {manifest.name}: {manifest.size} train / {manifest.test_size} test "
                f"(skipped {manifest.skipped_ineligible} ineligible)"
            )
    return 0


def _cmd_validate_cohort(args) -> int:
    from .cohorts import validate_cohort

    report = validate_cohort(args.file)
    print(
        f"{report.records_checked} records, {len(report.violations)} violations, "
        f"{len(report.warnings)} warnings, duplicate rate {report.duplicate_rate:.4f}"
    )
    for violation in report.violations[:20]:
        print(f"  line {violation['line']}: {violation['kind']} {violation['detail']}")
    if args.json_out:
        from dataclasses import asdict

        with open(args.json_out, "w", encoding="utf-8") as fh:
            json.dump(asdict(report), fh, indent=1, sort_keys=True)
    return 1 if report.violations else 0


def _cmd_puzzles(args) -> int:
    from .puzzles import (
        PuzzleConstraints,
        compute_puzzle_stats,
        generate_puzzles,
        import_puzzles,
        read_puzzles_ndjson,
        write_puzzles_ndjson,
    )

    if args.puzzle_cmd == "import":
        instances, problems = import_puzzles(args.in_path)
        digest = write_puzzles_ndjson(instances, args.out)
        print(f"{len(instances)} puzzles, {len(problems)} rejected -> {args.out}")
        for problem in problems[:20]:
            print(f"  {problem['where']}: {problem['kind']} {problem['detail']}")
        print(f"digest sha256:{digest}")
        return 0 if instances else 1
    if args.puzzle_cmd == "generate":
        constraints = PuzzleConstraints(
            min_pieces=args.min_pieces,
            max_pieces=args.max_pieces,
            require_mate=not args.allow_check,
        )
        instances = generate_puzzles(args.count, seed=args.seed, constraints=constraints)
        digest = write_puzzles_ndjson(instances, args.out)
        print(f"{len(instances)} puzzles -> {args.out}")
        print(f"digest sha256:{digest}")
        return 0
    if args.puzzle_cmd == "stats":
        instances = read_puzzles_ndjson(args.in_path)
        stats = compute_puzzle_stats(instances)
        print(stats.to_json())
        if args.json_out:
            with open(args.json_out, "w", encoding="utf-8") as fh:
                fh.write(stats.to_json() + "\n")
        return 0
    return 2


def _cmd_eval(args) -> int:
    from .harness import EvalConfig, evaluate, load_eval_dataset, make_endpoint
    from .harness.evaluate import dataset_digest

    instances = load_eval_dataset(args.dataset, goal_sentence=not args.no_goal)
    endpoint = make_endpoint(args.endpoint, timeout=args.timeout)
    try:
        config = EvalConfig(
            mode=args.mode,
            temperature=args.temp,
            max_retries=args.max_retries,
            timeout=args.timeout,
        )
        report, _ = evaluate(
            instances,
            endpoint,
            config,
            out_dir=args.out,
            dataset_info={
                "path": args.dataset,
                "digest": dataset_digest(args.dataset),
                "instances": len(instances),
            },
        )
    finally:
        endpoint.close()
    print(json.dumps(report.aggregate, indent=1, sort_keys=True))
    if args.out:
        print(f"artifacts in {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    from .harness import load_eval_dataset, make_endpoint, sweep_temperature

    instances = load_eval_dataset(args.dataset, goal_sentence=not args.no_goal)
    endpoint = make_endpoint(args.endpoint, timeout=args.timeout)
    try:
        temps = [float(t) for t in args.temps.split(",") if t]
        rows = sweep_temperature(instances, endpoint, temps, out_dir=args.out)
    finally:
        endpoint.close()
    for row in rows:
        print(
            f"T={row['temperature']}: pct_legal={row['pct_legal']} "
            f"pct_check_or_mate={row['pct_legal_check_or_mate']}"
        )
    return 0


def _cmd_baseline(args) -> int:
    from .baselines import build_frequency_table, make_baseline_handler
    from .harness.protocol import serve_stdio
    from .ingest import read_pair_records

    table = None
    if args.table:
        table = build_frequency_table(read_pair_records(args.table))
    handler = make_baseline_handler(
        args.policy, seed=args.seed, table=table, legal_prob=args.legal_prob
    )
    serve_stdio(
        handler,
        name=f"baseline-{args.policy}",
        hello_extra={"policy": args.policy, "seed": args.seed},
    )
    return 0


def _cmd_conformance(args) -> int:
    from .cohorts import render_instruction, render_prompt
    from .harness.protocol import check_conformance, make_endpoint
    from .notation import render_square_list
    from .rules import GameState

    prompt = render_prompt(render_instruction(render_square_list(GameState.initial())))
    endpoint = make_endpoint(args.endpoint, timeout=args.timeout)
    try:
        issues = check_conformance(endpoint, prompt)
    finally:
        endpoint.close()
    if issues:
        for issue in issues:
            print(f"FAIL {issue}")
        return 1
    print("conformant")
    return 0


def _cmd_pipeline(args) -> int:
    from .pipeline import run_pipeline

    run = run_pipeline(args.config, force=args.force)
    for result in run.results:
        print(f"{result.name}: {result.action} {result.detail}".rstrip())
    return 1 if run.failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="royalgame",
        description="Chess rules oracle, corpus tooling and eval harness.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"royalgame {__version__} (protocol {PROTOCOL_VERSION})",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse PGN files into board/move pairs")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--filter", choices=("white", "all"), default="white")
    p.add_argument("--dedupe", action="store_true")
    p.add_argument("--stats-out", default=None)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("build-cohorts", help="sample instruction cohorts from a pool")
    p.add_argument("--pool", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--sizes", required=True, help="comma separated sizes")
    p.add_argument("--seed", type=int, default=41)
    p.add_argument("--test-size", type=int, default=10_000)
    p.add_argument("--no-goal", action="store_true", help="omit the goal sentence")
    p.add_argument("--both", action="store_true", help="build goal and no-goal twins")
    p.set_defaults(func=_cmd_build_cohorts)

    p = sub.add_parser("validate-cohort", help="lint a cohort file")
    p.add_argument("--file", required=True)
    p.add_argument("--json-out", default=None)
    p.set_defaults(func=_cmd_validate_cohort)

    p = sub.add_parser("puzzles", help="one-ply puzzle tooling")
    pz = p.add_subparsers(dest="puzzle_cmd", required=True)
    q = pz.add_parser("import", help="import FEN or PGN problem sets")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--out", required=True)
    q = pz.add_parser("generate", help="generate puzzles from seeded playouts")
    q.add_argument("--count", type=int, default=100)
    q.add_argument("--seed", type=int, default=41)
    q.add_argument("--out", required=True)
    q.add_argument("--min-pieces", type=int, default=3)
    q.add_argument("--max-pieces", type=int, default=32)
    q.add_argument("--allow-check", action="store_true", help="accept check-only instances")
    q = pz.add_parser("stats", help="summarize a puzzle NDJSON file")
    q.add_argument("--in", dest="in_path", required=True)
    q.add_argument("--json-out", default=None)
    p.set_defaults(func=_cmd_puzzles)

    p = sub.add_parser("eval", help="run a dataset against an endpoint")
    p.add_argument("--dataset", required=True)
    p.add_argument("--endpoint", required=True, help='"cmd:..." or http(s) URL')
    p.add_argument("--mode", choices=("single", "retry"), default="single")
    p.add_argument("--temp", type=float, default=1.0)
    p.add_argument("--max-retries", type=int, default=100)
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--no-goal", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("sweep", help="temperature sweep with reference lines")
    p.add_argument("--dataset", required=True)
    p.add_argument("--endpoint", required=True)
    p.add_argument("--temps", required=True, help="comma separated temperatures")
    p.add_argument("--timeout", type=float, default=10.0)
    p.add_argument("--no-goal", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("baseline", help="serve a baseline policy over stdio")
    bl = p.add_subparsers(dest="baseline_cmd", required=True)
    q = bl.add_parser("serve")
    q.add_argument("--policy", choices=("random", "greedy", "frequency", "noisy"), required=True)
    q.add_argument("--seed", type=int, default=41)
    q.add_argument("--table", default=None, help="pairs.ndjson for the frequency policy")
    q.add_argument("--legal-prob", type=float, default=0.1)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("conformance", help="probe an endpoint against the protocol")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--timeout", type=float, default=10.0)
    p.set_defaults(func=_cmd_conformance)

    p = sub.add_parser("pipeline", help="run a config-driven pipeline")
    p.add_argument("--config", required=True)
    p.add_argument("--force", action="store_true", help="ignore stage manifests")
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RoyalgameError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
