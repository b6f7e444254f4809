from __future__ import annotations

import itertools
import sys

import numpy as np
import pytest

from rgs_repeater import clifford as cl
from rgs_repeater.graphstate import GraphState


def path_graph(n: int, vops: dict[int, cl.LocalClifford] | None = None) -> GraphState:
    """Vertices 0..n-1 joined in a line."""
    g = GraphState()
    for v in range(n):
        g.add_vertex((vops or {}).get(v, cl.I))
    for v in range(n - 1):
        g.add_edge(v, v + 1)
    return g


def graph_from(n: int, edges, vops: dict[int, cl.LocalClifford] | None = None) -> GraphState:
    g = GraphState()
    for v in range(n):
        g.add_vertex((vops or {}).get(v, cl.I))
    for u, v in edges:
        g.add_edge(u, v)
    return g


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


ALL_EDGES_5 = list(itertools.combinations(range(5), 2))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
