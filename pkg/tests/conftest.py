import sys

import numpy as np
import pytest
from hypothesis import strategies as st

from gwburn.offspring import make_builtin
from gwburn.tree import build_tree, rotate, unique_valid_rotation


@st.composite
def degree_sequences(draw, min_size=1, max_size=30):
    """Valid preorder degree sequences: drop s-1 balls in s boxes, then rotate."""
    s = draw(st.integers(min_size, max_size))
    boxes = draw(st.lists(st.integers(0, s - 1), min_size=s - 1, max_size=s - 1))
    d = np.bincount(np.asarray(boxes, dtype=np.int64), minlength=s)
    return tuple(rotate(d, unique_valid_rotation(d)).tolist())


@st.composite
def trees(draw, min_size=1, max_size=30):
    return build_tree(draw(degree_sequences(min_size, max_size)))


@pytest.fixture(scope="session")
def poisson():
    return make_builtin("poisson1")


@pytest.fixture(scope="session")
def geometric():
    return make_builtin("geometric_half")


@pytest.fixture(scope="session")
def two_point():
    return make_builtin("two_point", 2)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[crit].line())
