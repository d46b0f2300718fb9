import random

import pytest
from hypothesis import strategies as st

from graphhybrid.graph_core import Graph
from graphhybrid.embedding import phi

UNIVERSE12 = tuple(range(1, 13))

values = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def graphs(draw, universe=UNIVERSE12, max_vertices=10, allow_loops=True):
    labels = draw(st.lists(st.sampled_from(universe), max_size=max_vertices, unique=True))
    verts = {i: draw(values) for i in labels}
    candidates = [(p, q) for p in labels for q in labels if allow_loops or p != q]
    pairs = draw(st.lists(st.sampled_from(candidates), unique=True)) if candidates else []
    edges = {e: draw(values) for e in pairs}
    return Graph(verts, edges, allow_loops=allow_loops)


@st.composite
def states(draw, **kw):
    return phi(draw(graphs(**kw)))


def random_graph(rng: random.Random, universe=UNIVERSE12, max_vertices=10, p_edge=0.4) -> Graph:
    """Plain-``random`` generator for fixed-count acceptance loops."""
    k = rng.randint(0, max_vertices)
    labels = rng.sample(list(universe), k)
    verts = {i: rng.uniform(-1, 1) for i in labels}
    edges = {(p, q): rng.uniform(-1, 1) for p in labels for q in labels if rng.random() < p_edge}
    return Graph(verts, edges)


@pytest.fixture
def rng():
    return random.Random(20240611)


# ---------------------------------------------------------------- acceptance report

_ACCEPTANCE = pytest.StashKey[dict]()
N_CRITERIA = 10


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance result, print its line, then assert it."""
    results = request.config.stash[_ACCEPTANCE]

    def report(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {title}" + (f" ({detail})" if detail else "")
        results[number] = line
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        terminalreporter.write_line(results.get(n, f"NOT RUN criterion {n:>2}: deselected, or raised before reporting"))
