import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from retweetpol import _kernels
from retweetpol.graph import MonthlyGraph


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed tests measure steady state."""
    _kernels.warmup()


def ids_for(n: int) -> list[str]:
    return [f"u{i:03d}" for i in range(n)]


def graph_from(edges, n=None, month=1, ids=None) -> MonthlyGraph:
    if n is None:
        n = max(max(u, v) for u, v, *_ in edges) + 1
    triples = [(u, v, w[0] if w else 1) for u, v, *w in edges]
    return MonthlyGraph.from_edges(month, ids or ids_for(n), triples)


def clique_edges(nodes, weight=1):
    out = []
    nodes = list(nodes)
    for i in range(len(nodes)):
        for j in range(i + 1, len(nodes)):
            out.append((nodes[i], nodes[j], weight))
    return out


@pytest.fixture
def triangle():
    return graph_from([(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return graph_from([(0, 1), (1, 2)])


@pytest.fixture
def star4():
    return graph_from([(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def two_cliques_bridge():
    """Two 8-cliques joined by one unit edge (the hard tight-balance case)."""
    edges = clique_edges(range(8)) + clique_edges(range(8, 16)) + [(0, 8, 1)]
    return graph_from(edges, n=16)
