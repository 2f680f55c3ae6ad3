import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from discourse_fca.context import FormalContext

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = []


@pytest.fixture
def c3():
    """g1:{a,b}, g2:{a,c}, g3:{a,b,c}."""
    return FormalContext.from_sets(
        [{"a", "b"}, {"a", "c"}, {"a", "b", "c"}], ["a", "b", "c"], ["g1", "g2", "g3"]
    )


@pytest.fixture
def identity3():
    return FormalContext.from_sets([{"a"}, {"b"}, {"c"}], ["a", "b", "c"])


@st.composite
def contexts(draw, max_objects=12, max_attributes=10, min_density=0.0, max_density=1.0):
    n = draw(st.integers(1, max_objects))
    m = draw(st.integers(1, max_attributes))
    density = draw(st.floats(min_density, max_density))
    bits = draw(st.lists(st.floats(0, 1), min_size=n * m, max_size=n * m))
    matrix = [[bits[i * m + j] < density for j in range(m)] for i in range(n)]
    return FormalContext.from_matrix(matrix)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py::" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
