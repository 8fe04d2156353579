import pytest

from lhomlab.errors import InvalidInput, SearchCapExceeded
from lhomlab.graph import (
    Graph,
    claw_pattern,
    complete_bipartite,
    complete_graph,
    components,
    contains_induced,
    cycle_graph,
    cycle_tail_pattern,
    enumerate_induced_cycles,
    enumerate_induced_paths,
    graph_from_edgelist,
    graph_from_json,
    graph_to_edgelist,
    graph_to_json,
    is_isomorphic,
    line_graph,
    longest_induced_path_at_least,
    materialize_pattern,
    parse_pattern,
    path_graph,
    path_pattern,
    petersen_graph,
)


def test_graph_basics():
    g = Graph(3, [(0, 1), (1, 2)], loops=[2])
    assert g.has_edge(1, 0) and not g.has_edge(0, 2)
    assert g.nbhd(2) == {1, 2} and g.nbhd(0) == {1}
    assert g.closed(0) == {0, 1}
    assert g.num_edges == 2 and g.degree(1) == 2


def test_graph_rejects_bad_input():
    with pytest.raises(InvalidInput):
        Graph(2, [(0, 2)])
    with pytest.raises(InvalidInput):
        graph_from_json('{"n": 2, "edges": [[0, 1], [1, 0]]}')


def test_pattern_sizes():
    assert materialize_pattern(path_pattern(6)).order == 6
    assert materialize_pattern(claw_pattern(1, 2, 3)).order == 7
    assert materialize_pattern(cycle_tail_pattern(7, 3)).order == 10


def test_materialize_examples():
    claw = materialize_pattern(claw_pattern(1, 1, 1))
    assert (claw.order, claw.num_edges) == (4, 3)
    b = materialize_pattern(cycle_tail_pattern(7, 3))
    assert (b.order, b.num_edges) == (10, 10)
    p1 = materialize_pattern(path_pattern(1))
    assert (p1.order, p1.num_edges) == (1, 0)


def test_parse_pattern():
    assert parse_pattern("P5").name == "P5"
    assert materialize_pattern(parse_pattern("S2,2,2")).order == 7
    assert materialize_pattern(parse_pattern("K3")).num_edges == 3
    with pytest.raises(InvalidInput):
        parse_pattern("Q9")


def test_contains_induced_examples():
    assert contains_induced(cycle_graph(4), path_pattern(4)) is None
    assert contains_induced(complete_bipartite(1, 3), claw_pattern(1, 1, 1)) is not None
    b = materialize_pattern(cycle_tail_pattern(7, 3))
    # the longest induced path of the 7-cycle with a 3-vertex tail has 9 vertices
    assert contains_induced(b, path_pattern(9)) is not None
    assert contains_induced(b, path_pattern(10)) is None


def test_contains_induced_embedding_is_induced():
    g = petersen_graph()
    pat = materialize_pattern(path_pattern(5))
    emb = contains_induced(g, path_pattern(5))
    for i in range(5):
        for j in range(i + 1, 5):
            assert g.has_edge(emb[i], emb[j]) == pat.has_edge(i, j)


def test_node_cap_raises():
    with pytest.raises(SearchCapExceeded):
        contains_induced(petersen_graph(), claw_pattern(3, 3, 3), node_cap=5)


def test_enumerate_induced_paths_examples():
    p3 = path_graph(3)
    assert list(enumerate_induced_paths(p3, (0, 2), 3)) == [(0, 1, 2)]
    c5 = list(enumerate_induced_paths(cycle_graph(5), None, 2))
    assert sum(len(p) == 1 for p in c5) == 5 and sum(len(p) == 2 for p in c5) == 5
    assert len(list(enumerate_induced_paths(cycle_graph(6), (0, 3), 6))) == 2


def test_longest_induced_path():
    assert longest_induced_path_at_least(path_graph(5), 5) is not None
    assert longest_induced_path_at_least(path_graph(5), 6) is None
    assert longest_induced_path_at_least(cycle_graph(6), 5) is not None
    assert longest_induced_path_at_least(cycle_graph(6), 6) is None


def test_enumerate_induced_cycles_examples():
    cyc, _ = enumerate_induced_cycles(cycle_graph(6), 4)
    assert [len(c) for c in cyc] == [6]
    assert enumerate_induced_cycles(complete_graph(4), 4)[0] == []
    cyc, _ = enumerate_induced_cycles(petersen_graph(), 5, cap=20)
    assert sum(len(c) == 5 for c in cyc) == 12
    assert all(len(c) == 5 for c in cyc[:12])


def test_line_graph_examples():
    lg, index = line_graph(path_graph(4))
    assert is_isomorphic(lg, path_graph(3))
    assert is_isomorphic(line_graph(complete_graph(3))[0], complete_graph(3))
    assert is_isomorphic(line_graph(complete_bipartite(1, 3))[0], complete_graph(3))
    assert set(index) == set(path_graph(4).edges)


def test_components_examples():
    assert components(path_graph(3)) == [[0, 1, 2]]
    assert sorted(map(len, components(Graph(4, [(0, 1), (2, 3)])))) == [2, 2]
    assert components(Graph(3)) == [[0], [1], [2]]


def test_round_trips():
    g = Graph(5, [(0, 1), (1, 2), (3, 4)], loops=[2])
    assert graph_from_json(graph_to_json(g)) == g
    assert graph_from_edgelist(graph_to_edgelist(g)) == g
