"""End-to-end runs of the royalgame CLI, in-process via main(argv)."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

from royalgame.cli import main

PY = sys.executable
GREEDY_ENDPOINT = f"cmd:{PY} -m royalgame.cli baseline serve --policy greedy --seed 41"

BACK_RANK = "6k1/5ppp/8/8/8/8/8/R5K1 w - - 0 1"
CHECK_ONLY = "4k3/8/8/8/8/8/8/R3K3 w - - 0 1"


def test_version_banner(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == "royalgame 0.1.0 (protocol 1)"


def test_subcommand_is_required():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_ingest_writes_pairs(pgn_dir, tmp_path, capsys):
    out = tmp_path / "pairs"
    code = main(["ingest", "--in", str(pgn_dir), "--out", str(out)])
    assert code == 0
    assert (out / "pairs.ndjson").exists()
    assert (out / "errors.ndjson").exists()
    assert "pairs ->" in capsys.readouterr().out


def test_ingest_missing_dir_fails_cleanly(tmp_path, capsys):
    code = main(["ingest", "--in", str(tmp_path / "nope"), "--out", str(tmp_path / "o")])
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")


def test_cohort_build_and_validate_cycle(pgn_dir, tmp_path, capsys):
    pairs_dir = tmp_path / "pairs"
    assert main(["ingest", "--in", str(pgn_dir), "--out", str(pairs_dir)]) == 0
    pool = pairs_dir / "pairs.ndjson"

    cohorts = tmp_path / "cohorts"
    code = main(
        [
            "build-cohorts",
            "--pool",
            str(pool),
            "--sizes",
            "3",
            "--seed",
            "41",
            "--test-size",
            "2",
            "--out",
            str(cohorts),
        ]
    )
    assert code == 0
    assert "cohort goal-3: 3 train / 2 test" in capsys.readouterr().out
    train = cohorts / "goal-3" / "train.ndjson"
    assert train.exists()

    assert main(["validate-cohort", "--file", str(train)]) == 0
    capsys.readouterr()

    # A record whose output move is not legal on its board must trip the lint.
    rows = train.read_text(encoding="utf-8").splitlines()
    broken = json.loads(rows[0])
    broken["output"] = "Qz9"
    damaged = tmp_path / "damaged.ndjson"
    damaged.write_text("\n".join(rows + [json.dumps(broken)]) + "\n", encoding="utf-8")

    report_path = tmp_path / "lint.json"
    code = main(["validate-cohort", "--file", str(damaged), "--json-out", str(report_path)])
    assert code == 1
    assert "violations" in capsys.readouterr().out
    assert json.loads(report_path.read_text())["violations"]


def test_puzzles_generate_then_stats(tmp_path, capsys):
    out = tmp_path / "puzzles.ndjson"
    code = main(
        ["puzzles", "generate", "--count", "4", "--seed", "7", "--out", str(out)]
    )
    assert code == 0
    text = capsys.readouterr().out
    assert "4 puzzles" in text
    assert "digest sha256:" in text

    code = main(["puzzles", "stats", "--in", str(out)])
    assert code == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["count"] == 4
    assert stats["with_mate"] == 4


def test_puzzles_import_mixed_and_empty(tmp_path, capsys):
    mixed = tmp_path / "mixed.fen"
    mixed.write_text(f"{BACK_RANK}\nnot a fen at all\n", encoding="utf-8")
    out = tmp_path / "imported.ndjson"
    assert main(["puzzles", "import", "--in", str(mixed), "--out", str(out)]) == 0
    assert "1 puzzles, 1 rejected" in capsys.readouterr().out

    hopeless = tmp_path / "hopeless.fen"
    hopeless.write_text("garbage\n", encoding="utf-8")
    code = main(["puzzles", "import", "--in", str(hopeless), "--out", str(out)])
    assert code == 1


def test_conformance_against_served_baseline(capsys):
    code = main(["conformance", "--endpoint", GREEDY_ENDPOINT, "--timeout", "30"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "conformant"


def test_eval_cli_writes_artifacts(tmp_path, capsys):
    dataset = tmp_path / "ds.ndjson"
    dataset.write_text(
        json.dumps({"fen": BACK_RANK}) + "\n" + json.dumps({"fen": CHECK_ONLY}) + "\n",
        encoding="utf-8",
    )
    out = tmp_path / "run"
    code = main(
        [
            "eval",
            "--dataset",
            str(dataset),
            "--endpoint",
            GREEDY_ENDPOINT,
            "--mode",
            "single",
            "--timeout",
            "30",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert (out / "report.json").exists()
    assert (out / "records.ndjson").exists()
    report = json.loads((out / "report.json").read_text())
    assert report["attempted"] == 2
    assert report["aggregate"]["pct_legal"] == 100.0
    # greedy mates the back-rank board and checks the other
    assert report["counts"]["legal-and-mate"] == 1
    assert report["counts"]["legal-and-check"] == 1
    assert '"pct_legal": 100.0' in stdout


def test_eval_rejects_bad_endpoint_spec(tmp_path, capsys):
    dataset = tmp_path / "ds.ndjson"
    dataset.write_text(json.dumps({"fen": BACK_RANK}) + "\n", encoding="utf-8")
    code = main(["eval", "--dataset", str(dataset), "--endpoint", "bogus:x"])
    assert code == 1
    assert capsys.readouterr().err.startswith("error:")
