from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from bnstab.closure import DEGENERATION_RULES, compute_closure, default_grid  # noqa: E402
from bnstab.reference import load_reference  # noqa: E402
from bnstab.rules import Characteristic  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def reference():
    return load_reference()


@pytest.fixture(scope="session")
def full4():
    return compute_closure(default_grid(4))


@pytest.fixture(scope="session")
def full4_char2():
    return compute_closure(default_grid(4, Characteristic.TWO))


@pytest.fixture(scope="session")
def degen4():
    return compute_closure(default_grid(4), DEGENERATION_RULES)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
