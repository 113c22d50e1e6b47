import json
from pathlib import Path

import pytest

from royalgame_bridge.modeling import build_tiny_model

REPO_ROOT = Path(__file__).resolve().parents[2]
PAIRS_POOL = REPO_ROOT / "data" / "out" / "pairs.ndjson"
BUNDLED_COHORT = REPO_ROOT / "data" / "out" / "cohorts" / "goal-100" / "train.json"
BUNDLED_NOGOAL = REPO_ROOT / "data" / "out" / "cohorts" / "nogoal-100" / "train.json"


@pytest.fixture(scope="session")
def tiny_opt_dir(tmp_path_factory) -> str:
    return build_tiny_model(
        str(tmp_path_factory.mktemp("models") / "tiny-opt"), family="opt", seed=17
    )


@pytest.fixture(scope="session")
def tiny_neo_dir(tmp_path_factory) -> str:
    return build_tiny_model(
        str(tmp_path_factory.mktemp("models") / "tiny-neo"), family="neo", seed=17
    )


@pytest.fixture(scope="session")
def cohort_rows() -> list:
    return json.loads(BUNDLED_COHORT.read_text(encoding="utf-8"))


@pytest.fixture()
def mini_cohort(tmp_path, cohort_rows) -> Path:
    """A 16-record slice of the bundled cohort, in the array contract."""
    path = tmp_path / "mini.json"
    path.write_text(json.dumps(cohort_rows[:16]), encoding="utf-8")
    return path
