import random
from itertools import combinations

import pytest

from lhomlab.graph import Graph, cycle_graph
from lhomlab.instance import Instance
from lhomlab.target import TargetGraph, build_ht


def final_list(res, v):
    """List of original vertex ``v`` after preprocessing (fixed vertices give singletons)."""
    if v in res.fixed:
        return frozenset([res.fixed[v]])
    return res.instance.lists[res.kept.index(v)]


def random_instance(rng, h, n, p=0.4, list_p=0.6):
    g = Graph(n, [e for e in combinations(range(n), 2) if rng.random() < p])
    lists = []
    for _ in range(n):
        lst = frozenset(a for a in range(h.n) if rng.random() < list_p)
        lists.append(lst or frozenset([rng.randrange(h.n)]))
    return Instance(h, g, lists)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture
def rc4():
    return TargetGraph(cycle_graph(4, reflexive=True))


@pytest.fixture
def rc5():
    return TargetGraph(cycle_graph(5, reflexive=True))


@pytest.fixture
def h3():
    return build_ht(3)
