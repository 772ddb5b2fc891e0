import json
import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from satcheck.obstruction import CgPatternProfile  # noqa: E402

ACCEPTANCE_LINES = []


def load_data(name):
    return json.loads(resources.files("satcheck").joinpath(f"data/{name}").read_text())


@pytest.fixture(scope="session")
def composite_profile():
    return CgPatternProfile.from_json(load_data("example_composite.json"))


@pytest.fixture(scope="session")
def rj_profile():
    return CgPatternProfile.from_json(load_data("rj_profile.json"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
