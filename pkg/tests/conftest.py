import json
import pathlib
import sys

import numpy as np
import pytest

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from homranders.catalog import catalog_entries, catalog_entry  # noqa: E402

DATA = HERE.parent / "data"
ACCEPTANCE_LINES: list[str] = []


def last_axis_u(entry, c=0.5):
    u = np.zeros(entry.space.n)
    u[-1] = c
    return u


@pytest.fixture(scope="session")
def reference():
    return json.loads((HERE / "fixtures" / "reference.json").read_text())


@pytest.fixture(scope="session")
def entries():
    return catalog_entries()


@pytest.fixture
def h3():
    return catalog_entry("heisenberg3")


@pytest.fixture
def su2():
    return catalog_entry("su2")


@pytest.fixture
def hopf():
    return catalog_entry("hopf_s3")


@pytest.fixture
def h3r():
    return catalog_entry("h3r")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
