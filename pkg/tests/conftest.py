from __future__ import annotations

import pytest
from hypothesis import settings

from hublab.graph import Graph

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def tri() -> Graph:
    """Directed 3-cycle 0->1 (1), 1->2 (2), 2->0 (3)."""
    return Graph(3, [(0, 1, 1), (1, 2, 2), (2, 0, 3)], directed=True, weighted=True)


@pytest.fixture
def triangle() -> Graph:
    return tri()


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} [{criterion}] {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
