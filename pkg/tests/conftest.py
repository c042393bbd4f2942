import sys
from pathlib import Path

import numpy as np
import pytest

from kerbwsn.scenario import Scenario
from kerbwsn.world import build_world

GOLDEN = Path(__file__).parent / "golden"


def read_golden(name: str) -> list[list[str]]:
    lines = (GOLDEN / name).read_text().splitlines()
    return [line.split() for line in lines if line.strip() and not line.startswith("#")]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def scenario():
    return Scenario(seed=7)


@pytest.fixture
def world(scenario):
    return build_world(scenario)


def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance.summary_lines():
        terminalreporter.write_line(line)
