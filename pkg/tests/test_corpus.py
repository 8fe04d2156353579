import json
import random

import pytest

from lhomlab.corpus import (
    CorpusSpec,
    check_member,
    corpus_spec_from_dict,
    generate_corpus,
    is_ptfree,
    is_sabc_k3_free,
    planted_homomorphism,
    random_ptfree_graph,
    random_sabc_free_graph,
    random_target,
    separator_test_graph,
)
from lhomlab.errors import InvalidInput
from lhomlab.graph import Graph
from lhomlab.instance import instance_from_dict
from lhomlab.oracle import solve_brute
from lhomlab.target import find_predators


def test_random_target_predator_free():
    rng = random.Random(0)
    for _ in range(30):
        assert not find_predators(random_target(rng, 2, 6), limit=1)


@pytest.mark.parametrize("t", [2, 3, 4, 5, 6])
def test_ptfree_generator(t):
    rng = random.Random(t)
    for _ in range(20):
        g = random_ptfree_graph(rng, rng.randint(1, 14), t)
        assert is_ptfree(g, t)


def test_sabc_generator():
    rng = random.Random(3)
    for _ in range(20):
        g = random_sabc_free_graph(rng, rng.randint(1, 14), (2, 2, 2), max_degree=5)
        assert is_sabc_k3_free(g, (2, 2, 2))
        assert g.max_degree() <= 5


def test_separator_graphs():
    rng = random.Random(6)
    for t in (2, 3):
        for _ in range(10):
            g = separator_test_graph(rng, t, 40, 8)
            assert g.is_connected() and g.max_degree() <= 8 and g.order <= 40
            assert is_sabc_k3_free(g, (t, t, t))


def test_planted_homomorphism_is_valid():
    rng = random.Random(2)
    h = random_target(rng, 3, 5)
    g = Graph(4, [(0, 1), (1, 2), (2, 3)])
    phi = planted_homomorphism(rng, h, g)
    if phi is not None:
        assert all(h.adjacent(phi[u], phi[v]) for u, v in g.edges)


def test_generate_is_seeded_and_written(tmp_path):
    spec = {"family": "ptfree", "count": 5, "seed": 4, "n_max": 8, "t": 4}
    a = generate_corpus(spec, str(tmp_path))
    b = generate_corpus(spec)
    assert [x.instance for x in a] == [x.instance for x in b]
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files == [f"ptfree_{i:04d}.json" for i in range(5)]
    inst = instance_from_dict(json.loads((tmp_path / files[0]).read_text()))
    assert check_member(corpus_spec_from_dict(spec), inst)


@pytest.mark.parametrize("family", ["sabc", "ptfree", "bipartite-consistent", "ht", "sttt-sep"])
def test_every_family_generates_members(family):
    spec = CorpusSpec(family=family, count=4, seed=1, n_max=9, t=3)
    for item in generate_corpus(spec):
        assert check_member(spec, item.instance)


def test_planted_corpus_is_yes():
    spec = CorpusSpec(family="ptfree", count=5, seed=2, n_min=6, n_max=9, t=4, plant=1.0)
    planted = 0
    for item in generate_corpus(spec):
        if "planted" in item.meta:
            planted += 1
            assert solve_brute(item.instance, None).answer
    assert planted > 0


def test_bad_specs():
    with pytest.raises(InvalidInput):
        CorpusSpec(family="nope")
    with pytest.raises(InvalidInput):
        corpus_spec_from_dict({"family": "sabc", "colour": 3})
    with pytest.raises(InvalidInput):
        corpus_spec_from_dict({"count": 3})
