from __future__ import annotations

import pytest
from hypothesis import strategies as st

from finitary.core import FinitaryPoset, ObservationTable, finitary_substitute
from finitary.covering import Grid, paper_circle, sample_events, tabulate

ACCEPTANCE_LINES: list[str] = []


@st.composite
def tables(draw, max_events: int = 8, max_observers: int = 5):
    m = draw(st.integers(1, max_observers))
    n = draw(st.integers(0, max_events))
    masks = draw(st.lists(st.integers(1, 2**m - 1), min_size=n, max_size=n))
    rows = tuple(tuple(bool(mask >> k & 1) for k in range(m)) for mask in masks)
    return ObservationTable(
        tuple(f"e{k}" for k in range(n)), tuple(f"O{k + 1}" for k in range(m)), rows
    )


@st.composite
def posets(draw, max_events: int = 7, max_observers: int = 5):
    return finitary_substitute(draw(tables(max_events, max_observers)))


@pytest.fixture
def circle_table() -> ObservationTable:
    spec = paper_circle()
    return tabulate(spec, sample_events(spec, Grid(4)))


@pytest.fixture
def circle_poset(circle_table) -> FinitaryPoset:
    return finitary_substitute(circle_table)


@pytest.fixture
def circle_names(circle_poset) -> dict[str, str]:
    """The published names of the four classes."""
    return {"x": "pi/2", "y": "3pi/2", "z": "0", "w": "pi"}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    status = "PASS" if report.passed else "FAIL"
    line = f"[{status}] criterion {number}: {title} ({report.duration:.2f}s)"
    ACCEPTANCE_LINES.append(line)
    print("\n" + line)
