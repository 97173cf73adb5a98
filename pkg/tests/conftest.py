from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import settings

from rcbr.game import Game

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


def make_game(name, s1, s2, p1, p2) -> Game:
    return Game.from_matrices(name, s1, s2, p1, p2)


@pytest.fixture
def pd() -> Game:
    return make_game("pd", "CD", "CD", [[2, 0], [3, 1]], [[2, 3], [0, 1]])


@pytest.fixture
def cascade() -> Game:
    return make_game("cascade", "ab", "xy", [[1, 0], [0, 2]], [[1, 0], [1, 0]])


@pytest.fixture
def pennies() -> Game:
    return make_game("pennies", "HT", "HT", [[1, -1], [-1, 1]], [[-1, 1], [1, -1]])


@pytest.fixture
def mixdom() -> Game:
    return make_game("mixdom", "abc", "xy", [[3, 0], [0, 3], [1, 1]], [[1, 0], [0, 1], [1, 1]])
