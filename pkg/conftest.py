"""
共用測試 fixture
小圖：P3 (a-b-c)、星形 K1,3、加權三角形、C4
"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from services.graph_service import Graph, all_pairs_shortest_paths  # noqa: E402


def make(n, edges):
    graph = Graph.from_edges(n, [(u, v, w) for u, v, w in edges])
    return graph, all_pairs_shortest_paths(graph)


@pytest.fixture
def p3():
    """a=0, b=1, c=2"""
    return make(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def star():
    """中心 x=0，葉 1,2,3"""
    return make(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])


@pytest.fixture
def triangle():
    """(a,b)=1, (b,c)=1, (a,c)=3"""
    return make(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)])


@pytest.fixture
def c4():
    return make(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)])


@pytest.fixture
def p5():
    return make(5, [(i, i + 1, 1.0) for i in range(4)])
