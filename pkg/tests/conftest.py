import random
from pathlib import Path

import pytest

from fcsynth import state as app_state
from fcsynth.llm.mock import RuleDependencyJudge
from fcsynth.repository.pool import load_pool
from fcsynth.service.dependency_graph import build_graph_set

FIXTURES = Path(__file__).parent / "fixtures"


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--update-golden",
        action="store_true",
        default=False,
        help="rewrite the golden dataset from the current pipeline output",
    )


@pytest.fixture
def update_golden(request: pytest.FixtureRequest) -> bool:
    return bool(request.config.getoption("--update-golden"))


@pytest.fixture(autouse=True)
def single_job():
    # keep thread pools out of unit tests; concurrency is exercised explicitly
    app_state.set_jobs(1)
    yield


@pytest.fixture
def pool_path() -> Path:
    return FIXTURES / "toy_pool.json"


@pytest.fixture
def pool(pool_path):
    return load_pool(pool_path)


@pytest.fixture
def graphs(pool):
    return build_graph_set(pool, RuleDependencyJudge(), 30, random.Random(0))
