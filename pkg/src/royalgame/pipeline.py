"""Config-driven end-to-end runs with digest-gated, idempotent stages.

The config is a single JSON document (see docs/pipeline_config.md).  Stages
run in a fixed order: ingest, cohorts, puzzles, eval; only stages present
in the config execute.  Before running, each stage hashes its own config
plus the digests of its inputs; when a previous run left a manifest with
the same digest and the outputs still match their recorded digests, the
stage is skipped.  Every decision lands in an append-only journal
(journal.ndjson) in the workdir.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from typing import Dict, List, Optional

from .errors import RoyalgameError

STAGE_ORDER = ("ingest", "cohorts", "puzzles", "eval")


def _sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _sha256_obj(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


@dataclass
class StageResult:
    name: str
    action: str  # "run" | "skip" | "fail"
    detail: str = ""


class PipelineRun:
    def __init__(self, config: Dict, force: bool = False):
        if "workdir" not in config:
            raise RoyalgameError("pipeline config needs a workdir")
        self.config = config
        self.workdir = config["workdir"]
        self.force = force
        self.results: List[StageResult] = []
        os.makedirs(self.workdir, exist_ok=True)
        self._journal_path = os.path.join(self.workdir, "journal.ndjson")

    # -- bookkeeping ---------------------------------------------------------

    def _journal(self, stage: str, action: str, **extra) -> None:
        row = {"ts": round(time.time(), 3), "stage": stage, "action": action}
        row.update(extra)
        with open(self._journal_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(row) + "\n")

    def _manifest_path(self, stage: str) -> str:
        return os.path.join(self.workdir, f"{stage}.manifest.json")

    def _should_skip(self, stage: str, digest: str) -> bool:
        if self.force:
            return False
        path = self._manifest_path(stage)
        if not os.path.exists(path):
            return False
        try:
            with open(path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
        except (OSError, json.JSONDecodeError):
            return False
        if manifest.get("digest") != digest:
            return False
        for out_path, out_digest in manifest.get("outputs", {}).items():
            if not os.path.exists(out_path) or _sha256_file(out_path) != out_digest:
                return False
        return True

    def _record(self, stage: str, digest: str, outputs: List[str]) -> None:
        manifest = {
            "digest": digest,
            "outputs": {path: _sha256_file(path) for path in outputs},
        }
        with open(self._manifest_path(stage), "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
            fh.write("\n")

    def _input_digests(self, paths: List[str]) -> Dict[str, str]:
        digests = {}
        for path in paths:
            if os.path.isdir(path):
                for name in sorted(os.listdir(path)):
                    full = os.path.join(path, name)
                    if os.path.isfile(full):
                        digests[full] = _sha256_file(full)
            elif os.path.isfile(path):
                digests[path] = _sha256_file(path)
        return digests

    # -- stages ---------------------------------------------------------------

    def run(self) -> List[StageResult]:
        for stage in STAGE_ORDER:
            if stage not in self.config:
                continue
            runner = getattr(self, f"_stage_{stage}")
            try:
                runner(self.config[stage])
            except KeyError as exc:
                message = f"missing config key {exc} for stage '{stage}'"
                self.results.append(StageResult(stage, "fail", message))
                self._journal(stage, "fail", error=message)
                break
            except (RoyalgameError, OSError) as exc:
                self.results.append(StageResult(stage, "fail", str(exc)))
                self._journal(stage, "fail", error=str(exc))
                break
        return self.results

    @property
    def failed(self) -> bool:
        return any(r.action == "fail" for r in self.results)

    def _stage_ingest(self, cfg: Dict) -> None:
        from .ingest import ingest_run

        in_dir = cfg["in"]
        out_dir = os.path.join(self.workdir, "pairs")
        digest = _sha256_obj({"cfg": cfg, "inputs": self._input_digests([in_dir])})
        if self._should_skip("ingest", digest):
            self.results.append(StageResult("ingest", "skip"))
            self._journal("ingest", "skip", digest=digest)
            return
        summary = ingest_run(
            in_dir,
            out_dir,
            side_filter=cfg.get("filter", "white"),
            dedupe=cfg.get("dedupe", False),
            stats_out=os.path.join(self.workdir, "stats") if cfg.get("stats") else None,
        )
        self._record("ingest", digest, [summary["pairs_path"], summary["errors_path"]])
        self.results.append(StageResult("ingest", "run", f"{summary['pairs']} pairs"))
        self._journal("ingest", "run", digest=digest, pairs=summary["pairs"])

    def _stage_cohorts(self, cfg: Dict) -> None:
        from .cohorts import build_cohort_ladder, validate_cohort
        from .ingest import read_pair_records

        pool_path = cfg.get("pool") or os.path.join(self.workdir, "pairs", "pairs.ndjson")
        digest = _sha256_obj({"cfg": cfg, "inputs": self._input_digests([pool_path])})
        if self._should_skip("cohorts", digest):
            self.results.append(StageResult("cohorts", "skip"))
            self._journal("cohorts", "skip", digest=digest)
            return
        pool = read_pair_records(pool_path)
        out_root = os.path.join(self.workdir, "cohorts")
        outputs: List[str] = []
        goal_variants = [True]
        if cfg.get("no_goal_twin"):
            goal_variants.append(False)
        elif cfg.get("goal") is False:
            goal_variants = [False]
        for goal in goal_variants:
            manifests = build_cohort_ladder(
                pool,
                sizes=cfg["sizes"],
                out_root=out_root,
                seed=cfg.get("seed", 41),
                test_size=cfg.get("test_size", 10_000),
                goal_sentence=goal,
                pool_digest=_sha256_file(pool_path),
            )
            for manifest in manifests:
                cohort_dir = os.path.join(out_root, manifest.name)
                for fname in manifest.files:
                    outputs.append(os.path.join(cohort_dir, fname))
                train = os.path.join(cohort_dir, "train.ndjson")
                lint = validate_cohort(train)
                if lint.violations:
                    raise RoyalgameError(
                        f"cohort {manifest.name} failed lint: "
                        f"{lint.violations[0]} (+{len(lint.violations) - 1} more)"
                    )
        self._record("cohorts", digest, outputs)
        self.results.append(StageResult("cohorts", "run", f"{len(outputs)} files"))
        self._journal("cohorts", "run", digest=digest, files=len(outputs))

    def _stage_puzzles(self, cfg: Dict) -> None:
        from .puzzles import (
            PuzzleConstraints,
            generate_puzzles,
            import_puzzles,
            write_puzzles_ndjson,
        )

        digest_inputs = {}
        if "import" in cfg:
            digest_inputs = self._input_digests([cfg["import"]])
        digest = _sha256_obj({"cfg": cfg, "inputs": digest_inputs})
        if self._should_skip("puzzles", digest):
            self.results.append(StageResult("puzzles", "skip"))
            self._journal("puzzles", "skip", digest=digest)
            return
        out_path = os.path.join(self.workdir, "puzzles.ndjson")
        if "import" in cfg:
            instances, problems = import_puzzles(cfg["import"])
            if not instances:
                raise RoyalgameError("no usable puzzles imported")
        else:
            constraints = PuzzleConstraints(
                min_pieces=cfg.get("min_pieces", 3),
                max_pieces=cfg.get("max_pieces", 32),
                require_mate=cfg.get("require_mate", True),
            )
            instances = generate_puzzles(
                count=cfg.get("count", 100),
                seed=cfg.get("seed", 41),
                constraints=constraints,
            )
        write_puzzles_ndjson(instances, out_path)
        self._record("puzzles", digest, [out_path])
        self.results.append(StageResult("puzzles", "run", f"{len(instances)} puzzles"))
        self._journal("puzzles", "run", digest=digest, puzzles=len(instances))

    def _stage_eval(self, cfg: Dict) -> None:
        from .harness import EvalConfig, evaluate, load_eval_dataset, make_endpoint
        from .harness.evaluate import dataset_digest

        dataset = cfg["dataset"]
        if dataset.startswith("cohort-test:"):
            name = dataset.split(":", 1)[1]
            dataset = os.path.join(self.workdir, "cohorts", name, "test.ndjson")
        digest = _sha256_obj({"cfg": cfg, "inputs": self._input_digests([dataset])})
        if self._should_skip("eval", digest):
            self.results.append(StageResult("eval", "skip"))
            self._journal("eval", "skip", digest=digest)
            return
        instances = load_eval_dataset(dataset)
        endpoint = make_endpoint(cfg["endpoint"], timeout=cfg.get("timeout", 10.0))
        try:
            config = EvalConfig(
                mode=cfg.get("mode", "single"),
                temperature=cfg.get("temperature", 1.0),
                max_retries=cfg.get("max_retries", 100),
                timeout=cfg.get("timeout", 10.0),
            )
            out_dir = os.path.join(self.workdir, "report")
            report, _ = evaluate(
                instances,
                endpoint,
                config,
                out_dir=out_dir,
                dataset_info={
                    "path": dataset,
                    "digest": dataset_digest(dataset),
                    "instances": len(instances),
                },
            )
        finally:
            endpoint.close()
        outputs = [os.path.join(out_dir, n) for n in ("report.json", "records.ndjson", "plotdata.csv")]
        self._record("eval", digest, outputs)
        self.results.append(
            StageResult("eval", "run", f"pct_legal={report.aggregate['pct_legal']}")
        )
        self._journal("eval", "run", digest=digest, pct_legal=report.aggregate["pct_legal"])


def run_pipeline(config_path: str, force: bool = False) -> PipelineRun:
    with open(config_path, "r", encoding="utf-8") as fh:
        config = json.load(fh)
    run = PipelineRun(config, force=force)
    run.run()
    return run
