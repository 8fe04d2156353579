import math
import random

import pytest

from lhomlab.corpus import random_lists, random_sabc_free_graph, random_target
from lhomlab.errors import PreconditionError, PredatorFound
from lhomlab.graph import complete_bipartite, complete_graph, cycle_graph
from lhomlab.instance import Instance, check_homomorphism, full_lists
from lhomlab.oracle import solve_brute
from lhomlab.target import TargetGraph
from lhomlab.winwin import WinWinConfig, degree_threshold, pick_nonedge, solve_sabc


def test_degree_threshold():
    assert degree_threshold(1) == 0
    assert degree_threshold(16) == pytest.approx(8.0)
    assert degree_threshold(8) == pytest.approx(math.sqrt(24))


def test_pick_nonedge():
    h = TargetGraph(cycle_graph(6))
    assert pick_nonedge(h, {0, 2}, {1, 3}) == (0, 3)
    k = TargetGraph(complete_bipartite(2, 2))
    with pytest.raises(PredatorFound):
        pick_nonedge(k, {0, 1}, {2, 3})


@pytest.mark.parametrize("strategy", ["separator", "min-fill"])
def test_matches_oracle(strategy):
    rng = random.Random(55)
    for _ in range(60):
        h = random_target(rng, 2, 5)
        n = rng.randint(1, 11)
        g = random_sabc_free_graph(rng, n, (2, 2, 2), p=rng.choice((0.2, 0.4)))
        inst = Instance(h, g, random_lists(rng, range(h.n), n))
        res = solve_sabc(inst, WinWinConfig(decomposition=strategy))
        assert res.answer == solve_brute(inst, None).answer
        if res.answer:
            assert check_homomorphism(inst, res.witness)


def test_high_degree_branch_used():
    h = TargetGraph(cycle_graph(6))
    inst = full_lists(h, complete_bipartite(1, 9))
    res = solve_sabc(inst, WinWinConfig(claw=(1, 1, 1), check_free=False))
    assert res.answer and res.stats["branch_steps"] >= 1


def test_preconditions():
    k3 = TargetGraph(complete_graph(3))
    with pytest.raises(PreconditionError):
        solve_sabc(full_lists(k3, complete_graph(3)))
    pred = TargetGraph(cycle_graph(4, reflexive=True))
    with pytest.raises(PredatorFound):
        solve_sabc(full_lists(pred, cycle_graph(5)))


def test_triangle_short_circuit():
    c6 = TargetGraph(cycle_graph(6))
    assert not solve_sabc(full_lists(c6, complete_graph(3))).answer
