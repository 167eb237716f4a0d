from __future__ import annotations

import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def tfim4():
    from qgf.pauli import build_tfim, diagonalize

    h = build_tfim(4, 1.0, 2.0)
    return h, diagonalize(h)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion; lines are echoed in the terminal summary."""

    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title} ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
