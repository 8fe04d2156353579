import random

import pytest

from conftest import random_instance
from lhomlab.errors import InvalidInput, PreconditionError
from lhomlab.graph import Graph, complete_bipartite, complete_graph, cycle_graph, path_graph
from lhomlab.instance import (
    EdgeInstance,
    Instance,
    check_homomorphism,
    edge_instance_from_dict,
    expand_edge_instance,
    full_lists,
    identify_pending_edges,
    identify_vertices,
    instance_from_dict,
    instance_from_json,
    is_consistent,
    lift_star_instance,
    star_instance,
    validate,
)
from lhomlab.oracle import solve_brute
from lhomlab.target import TargetGraph, associated_bipartite


def test_validate_examples():
    h = TargetGraph(complete_graph(3))
    assert validate(Instance(h, path_graph(2), [{0, 1}, {2}]))
    bad = validate(Instance(h, path_graph(2), [{0, 5}, {2}]))
    assert not bad and bad.where == 0
    assert not validate(Instance(h, Graph(2, [(0, 1)], loops=[0]), [{0}, {1}]))


def test_instance_json_errors():
    with pytest.raises(InvalidInput):
        instance_from_json("{not json")
    with pytest.raises(InvalidInput):
        instance_from_dict({"graph": {"n": 1}})
    h = TargetGraph(complete_graph(3))
    inst = Instance(h, path_graph(3), [{0}, {1, 2}, {0, 2}])
    assert instance_from_json(inst.to_json()) == inst


def test_consistency_examples():
    sm = associated_bipartite(complete_graph(3))
    star = sm.star
    a1, b2 = sm.prime_of[0], sm.doubleprime_of[1]
    assert is_consistent(Instance(star, path_graph(2), [{a1}, {b2}])) is not None
    assert is_consistent(Instance(star, complete_graph(3), [{0}, {1}, {2}])) is None
    assert is_consistent(Instance(star, path_graph(3), [{0}, {1}, {2}])) is None


def test_lift_examples():
    sm = associated_bipartite(cycle_graph(4, reflexive=True))
    star = sm.star
    inst = Instance(star, path_graph(2), [{sm.prime_of[0]}, {sm.doubleprime_of[1]}])
    lifted = lift_star_instance(inst, sm)
    assert lifted.lists == (frozenset({0}), frozenset({1}))
    inst = Instance(star, Graph(1), [{sm.prime_of[0], sm.prime_of[2]}])
    assert lift_star_instance(inst, sm).lists == (frozenset({0, 2}),)


def test_lift_preserves_solvability_random(rc4):
    sm = associated_bipartite(rc4)
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(2, 7)
        left = rng.randint(1, n - 1)
        g = Graph(n, [(u, v) for u in range(left) for v in range(left, n) if rng.random() < 0.5])
        lists = [frozenset(rng.sample(range(4), rng.randint(1, 3))) for _ in range(n)]
        base = Instance(rc4, g, lists)
        side = [0 if v < left else 1 for v in range(n)]
        star = star_instance(base, sm, side)
        lifted = lift_star_instance(star, sm)
        assert solve_brute(star, None).answer == solve_brute(lifted, None).answer


def test_lift_rejects_inconsistent(rc4):
    sm = associated_bipartite(rc4)
    with pytest.raises(PreconditionError):
        lift_star_instance(Instance(sm.star, path_graph(2), [{0}, {1}]), sm)


def test_expand_edge_instance_examples():
    h = TargetGraph(complete_graph(3))
    e = EdgeInstance(h, path_graph(3), {(0, 1): {0, 1}, (1, 2): {1, 2}})
    inst, index = expand_edge_instance(e)
    assert inst.n == 2 and inst.graph.num_edges == 1
    assert inst.lists[index[(0, 1)]] == {0, 1}
    star = EdgeInstance(h, complete_bipartite(1, 3), {(0, 1): {0, 1, 2}, (0, 2): {0, 1, 2}, (0, 3): {0, 1, 2}})
    inst, _ = expand_edge_instance(star)
    assert inst.n == 3 and inst.graph.num_edges == 3


def test_edge_instance_matches_direct_edge_colouring():
    # a proper edge colouring of K_{1,3} with 2 colours is impossible, with 3 possible
    for k, expect in ((2, False), (3, True)):
        h = TargetGraph(complete_graph(k))
        e = EdgeInstance(h, complete_bipartite(1, 3), {(0, i): set(range(k)) for i in (1, 2, 3)})
        assert solve_brute(expand_edge_instance(e)[0], None).answer == expect


def test_identify_pending_edges_examples():
    h = TargetGraph(complete_graph(3))
    S = {0, 1}
    p2 = EdgeInstance(h, path_graph(2), {(0, 1): S})
    glued, m1, m2 = identify_pending_edges(p2, (0, 1), p2, (0, 1))
    assert glued.graph.order == 2 and glued.graph.num_edges == 1
    p3 = EdgeInstance(h, path_graph(3), {(0, 1): S, (1, 2): {2}})
    glued, m1, m2 = identify_pending_edges(p3, (0, 1), p3, (0, 1))
    assert glued.graph.order == 4 and glued.graph.num_edges == 3
    other = EdgeInstance(h, path_graph(2), {(0, 1): {1, 2}})
    with pytest.raises(PreconditionError):
        identify_pending_edges(p2, (0, 1), other, (0, 1))


def test_identify_vertices():
    h = TargetGraph(complete_graph(3))
    inst = Instance(h, Graph(4, [(0, 1), (2, 3)]), [{0}, {1}, {0}, {2}])
    merged, newid = identify_vertices(inst, [(0, 2)])
    assert merged.n == 3 and newid[0] == newid[2]
    with pytest.raises(PreconditionError):
        identify_vertices(inst, [(0, 1)])


def test_check_homomorphism():
    h = TargetGraph(complete_graph(3))
    inst = full_lists(h, path_graph(3))
    assert check_homomorphism(inst, (0, 1, 0))
    assert not check_homomorphism(inst, (0, 0, 1))


def test_edge_instance_json():
    h = TargetGraph(complete_graph(3))
    e = EdgeInstance(h, path_graph(3), {(0, 1): {0, 1}, (1, 2): {1, 2}})
    import json

    assert edge_instance_from_dict(json.loads(e.to_json())) == e
