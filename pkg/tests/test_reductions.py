import random

import pytest

from lhomlab.errors import InvalidInput, PreconditionError
from lhomlab.graph import Graph, complete_graph, cycle_graph, path_graph
from lhomlab.instance import Instance, full_lists
from lhomlab.oracle import solve_brute
from lhomlab.reductions import (
    col3_to_sabc,
    is_three_colourable,
    lift_reduction_to_nonbipartite,
    make_formula,
    parse_dimacs_cnf,
    random_3cnf,
    recheck_freeness,
    rigidity_lists,
    sat_gadgets,
    sat_to_linegraph,
    sat_to_ptfree,
    to_split_instance,
    verify_reduction,
)
from lhomlab.target import TargetGraph, associated_bipartite


def test_dimacs_round_trip_and_errors():
    phi = make_formula(3, [[1, -2, 3], [-1], [2, 3]])
    assert parse_dimacs_cnf(phi.to_dimacs()) == phi
    with pytest.raises(InvalidInput):
        parse_dimacs_cnf("p cnf 2 2\n1 2 0\n")
    with pytest.raises(InvalidInput):
        parse_dimacs_cnf("1 2 0\n")
    with pytest.raises(InvalidInput):
        make_formula(2, [[3]])
    with pytest.raises(InvalidInput):
        make_formula(2, [[1, 2, 1, 2]])


def test_formula_satisfiability():
    assert make_formula(1, [[1]]).satisfiable()
    assert not make_formula(1, [[1], [-1]]).satisfiable()


def test_sat_to_ptfree_small(h3):
    sg = sat_gadgets(h3)
    for phi, expect in ((make_formula(1, [[1]]), True), (make_formula(1, [[1], [-1]]), False)):
        art = sat_to_ptfree(phi, h3)
        assert art.notes["t"] == 4 * sg.t_prime + 4
        assert art.freeness["status"] == "verified"
        assert verify_reduction(art, expect)


def test_sat_to_ptfree_random(h3):
    rng = random.Random(8)
    for _ in range(3):
        phi = random_3cnf(rng, 2, 3)
        art = sat_to_ptfree(phi, h3, check_free=False)
        assert verify_reduction(art, phi.satisfiable())


def test_lift_to_nonbipartite():
    mp = associated_bipartite(TargetGraph(cycle_graph(4, reflexive=True)))
    assert mp.star.is_bipartite
    phi = make_formula(1, [[1], [-1]])
    art = sat_to_ptfree(phi, mp.star, check_free=False)
    lifted = lift_reduction_to_nonbipartite(art, mp)
    assert lifted.instance.target.n == 4
    assert not solve_brute(lifted.instance, None).answer


def test_rigidity_lists_reflexive_c4(rc4):
    case, lists = rigidity_lists(rc4, (0, 1, 2))
    assert case == 3
    assert sorted(map(sorted, lists)) == [[0, 2], [0, 3], [2, 3]]
    with pytest.raises(PreconditionError):
        rigidity_lists(TargetGraph(cycle_graph(4)), (0, 1, 2))


@pytest.mark.parametrize("g", [cycle_graph(5), complete_graph(4), path_graph(3), Graph(2)])
def test_col3_reduction(rc4, g):
    art = col3_to_sabc(g, rc4, (0, 1, 2))
    assert art.freeness["status"] in ("verified", "cap-limited")
    assert verify_reduction(art, is_three_colourable(g))


def test_sat_to_linegraph(rc5):
    for phi in (make_formula(2, [[1, 2], [-1]]), make_formula(1, [[1], [-1]])):
        art = sat_to_linegraph(phi, rc5, 0, 2)
        assert art.edge_instance is not None
        assert verify_reduction(art, phi.satisfiable())


def test_sat_to_linegraph_precondition():
    with pytest.raises(PreconditionError):
        sat_to_linegraph(make_formula(1, [[1]]), TargetGraph(complete_graph(3)), 0, 1)


def test_split_transform():
    # looped clique {0, 1}, loopless independent {2, 3}
    h = TargetGraph(Graph(4, [(0, 1), (0, 2), (1, 3)], loops=[0, 1]))
    rng = random.Random(1)
    for _ in range(80):
        n = rng.randint(1, 6)
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4])
        lists = [frozenset(rng.choice(([0, 1], [2, 3], [0], [2], [1]))) for _ in range(n)]
        inst = Instance(h, g, lists)
        res = to_split_instance(inst)
        expect = solve_brute(inst, None).answer
        if res.status == "no":
            assert not expect
        else:
            assert solve_brute(res.instance, None).answer == expect
    with pytest.raises(PreconditionError):
        to_split_instance(full_lists(TargetGraph(cycle_graph(5)), path_graph(2)))


def test_recheck_freeness(h3):
    art = sat_to_ptfree(make_formula(1, [[1]]), h3, check_free=False)
    assert art.freeness["status"] != "violated"
    assert recheck_freeness(art)["status"] == "verified"
