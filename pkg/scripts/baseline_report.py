#!/usr/bin/env python3
"""Score every bundled baseline policy on one dataset and print a table.

Ties the pieces together the way a model eval would: spawn each policy as a
subprocess endpoint (the same code path a real model server uses), run the
harness, and show the label breakdown next to the paper-style reference
lines. Useful as a smoke test that the whole stack is wired up.

    python3 scripts/baseline_report.py --dataset data/pipeline/puzzles.ndjson
    python3 scripts/baseline_report.py --dataset work/cohorts/goal-200/test.ndjson \
        --policies random,greedy --retry
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from royalgame.harness import EvalConfig, evaluate, load_eval_dataset, make_endpoint

PY = sys.executable


def endpoint_spec(policy: str, seed: int, table: str) -> str:
    spec = f"cmd:{PY} -m royalgame.cli baseline serve --policy {policy} --seed {seed}"
    if policy == "frequency":
        if not table:
            raise SystemExit("frequency policy needs --table pairs.ndjson")
        spec += f" --table {table}"
    return spec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--dataset", required=True, help="NDJSON with instruction/fen/board rows")
    ap.add_argument("--policies", default="random,greedy,frequency,noisy")
    ap.add_argument("--seed", type=int, default=41)
    ap.add_argument("--table", default=None, help="pairs.ndjson for the frequency policy")
    ap.add_argument("--retry", action="store_true", help="retry-until-legal instead of single shot")
    ap.add_argument("--limit", type=int, default=200, help="cap instances (0 = all)")
    ap.add_argument("--out", default=None, help="write per-policy artifacts under this directory")
    args = ap.parse_args()

    instances = load_eval_dataset(args.dataset)
    if args.limit:
        instances = instances[: args.limit]
    config = EvalConfig(mode="retry" if args.retry else "single")

    rows = []
    for policy in [p for p in args.policies.split(",") if p]:
        endpoint = make_endpoint(endpoint_spec(policy, args.seed, args.table), timeout=30.0)
        try:
            out_dir = os.path.join(args.out, policy) if args.out else None
            report, _ = evaluate(instances, endpoint, config, out_dir=out_dir)
        finally:
            endpoint.close()
        rows.append((policy, report))

    header = f"{'policy':<10} {'n':>5} {'%legal':>8} {'%chk/mate':>10} {'%illegal':>9} {'%absent':>8} {'attempts':>9}"
    print(f"\n{len(instances)} instances from {args.dataset}, mode={config.mode}\n")
    print(header)
    print("-" * len(header))
    for policy, report in rows:
        agg, pct = report.aggregate, report.percentages
        print(
            f"{policy:<10} {report.attempted:>5} {agg['pct_legal']:>8.2f} "
            f"{agg['pct_legal_check_or_mate']:>10.2f} {pct['illegal']:>9.2f} "
            f"{pct['piece-not-on-board']:>8.2f} {agg['mean_attempts']:>9.2f}"
        )
    print()
    for line in rows[0][1].reference_lines:
        print(f"reference: {line['metric']} {line['comparator']} {line['value']}  ({line['label']})")


if __name__ == "__main__":
    main()
