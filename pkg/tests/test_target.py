import pytest

from lhomlab.errors import InvalidInput
from lhomlab.graph import Graph, complete_graph, cycle_graph, is_isomorphic, path_graph
from lhomlab.target import (
    DecompositionTriple,
    TargetGraph,
    associated_bipartite,
    bipartite_decomposition,
    build_ht,
    build_target,
    check_decomposition,
    classify_target,
    find_incomparable_c4,
    find_predators,
    find_simple_triangles,
    ht_labels,
    minimal_non_interval_subgraph,
    reflexive_interval_check,
    strong_split_partition,
)


def test_comparability_examples():
    k2 = build_target(complete_graph(2))
    assert k2.incomparable(0, 1)
    rk2 = build_target(complete_graph(2, reflexive=True))
    assert rk2.nbhd[0] == rk2.nbhd[1] and not rk2.incomparable(0, 1)
    p3 = build_target(path_graph(3))
    assert p3.nbhd[0] == p3.nbhd[2]
    assert p3.incomparable(0, 1)
    assert p3.incomparable(0, 1) == p3.incomparable(1, 0)


def test_predators_examples():
    h5 = build_ht(5)
    lab = ht_labels(5)
    quads = find_predators(h5)
    assert (5, lab["a"], 6, lab["b"]) in {(a1, a2, b1, b2) for a1, a2, b1, b2 in quads} or any(
        set(q) == {5, 6, lab["a"], lab["b"]} for q in quads
    )
    assert find_predators(build_target(path_graph(4))) == []
    assert find_predators(build_target(cycle_graph(4))) == []


def test_ht_examples():
    h = build_ht(3)
    assert (h.n, h.graph.num_edges) == (10, 11)
    assert not h.graph.loops and h.is_bipartite
    h5 = build_ht(5)
    sub, _ = h5.graph.induced(range(10))
    assert is_isomorphic(sub, cycle_graph(10))
    lab = ht_labels(3)
    assert any(set(q) == {3, 4, lab["a"], lab["b"]} for q in find_predators(h))
    with pytest.raises(InvalidInput):
        build_ht(2)


def test_associated_bipartite_examples(rc4):
    assert is_isomorphic(associated_bipartite(complete_graph(3)).star.graph, cycle_graph(6))
    star = associated_bipartite(complete_graph(2)).star.graph
    assert star.order == 4 and star.num_edges == 2
    assert is_isomorphic(associated_bipartite(Graph(1, loops=[0])).star.graph, complete_graph(2))
    sm = associated_bipartite(rc4)
    assert sm.star.n == 8 and sm.star.is_bipartite
    # the star of the reflexive 4-cycle is the 3-cube (3-regular), not an 8-cycle
    assert all(sm.star.graph.degree(v) == 3 for v in range(8))
    for a in range(4):
        for b in range(4):
            assert sm.star.adjacent(sm.prime_of[a], sm.doubleprime_of[b]) == rc4.adjacent(a, b)


def test_incomparable_c4_duality_small(rc4):
    assert bool(find_predators(rc4)) == bool(find_incomparable_c4(associated_bipartite(rc4).star))


def test_simple_triangles():
    assert len(find_simple_triangles(complete_graph(3))) == 1
    assert find_simple_triangles(complete_graph(3, reflexive=True)) == []
    assert len(find_simple_triangles(complete_graph(4))) == 4


def test_strong_split_examples():
    h = Graph(3, [(0, 1)], loops=[0, 1])
    assert strong_split_partition(h) == ((0, 1), (2,))
    assert strong_split_partition(complete_graph(3)) is None
    assert strong_split_partition(Graph(2, loops=[0, 1])) is None


def test_bipartite_decomposition_examples():
    assert bipartite_decomposition(build_ht(3)) is None
    c8 = TargetGraph(cycle_graph(8))
    assert bipartite_decomposition(c8) is None
    claw = TargetGraph(Graph(4, [(0, 1), (0, 2), (0, 3)]))
    dec = bipartite_decomposition(claw)
    assert dec is not None
    assert check_decomposition(claw, dec)[0]
    manual = DecompositionTriple(frozenset({1, 2}), frozenset({0}), frozenset({3}))
    assert check_decomposition(claw, manual)[0]


def test_interval_examples(rc4):
    assert reflexive_interval_check(Graph(5, path_graph(5).edges, range(5)))["interval"]
    res = reflexive_interval_check(rc4)
    assert not res["interval"] and sorted(res["witness"]["induced_cycle"]) == [0, 1, 2, 3]
    rc6 = TargetGraph(cycle_graph(6, reflexive=True))
    assert not reflexive_interval_check(rc6)["interval"]
    sub, keep = minimal_non_interval_subgraph(rc4)
    assert keep == [0, 1, 2, 3]
    pend = Graph(5, list(cycle_graph(4).edges) + [(3, 4)], loops=range(5))
    sub, keep = minimal_non_interval_subgraph(pend)
    assert keep == [0, 1, 2, 3]
    sub, keep = minimal_non_interval_subgraph(rc6)
    assert len(keep) <= 6 and not reflexive_interval_check(sub)["interval"]


def test_classify_examples(rc4):
    rep = classify_target(rc4)
    assert rep.value("incomparable_loop_triple_present")
    assert rep.witness("incomparable_loop_triple_present") == [0, 1, 2]
    rep = classify_target(build_ht(4))
    assert rep.value("predator_present") and rep.value("irreflexive")
    assert rep.value("bipartite") and rep.value("undecomposable")
    rep = classify_target(complete_graph(3))
    assert rep.value("simple_triangle_present") and not rep.value("predator_present")
