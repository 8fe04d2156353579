"""Seeded instance generators for tests and benchmarks.

Every emitted graph is re-checked against its family before it is returned,
and the same seed always yields the same instances.
"""

from __future__ import annotations

import json
import os
import random
from dataclasses import dataclass, field
from itertools import combinations

from .errors import InvalidInput, LabError
from .graph import (
    Graph,
    claw_pattern,
    contains_induced,
    cycle_graph,
    longest_induced_path_at_least,
    triangle_pattern,
)
from .instance import Instance, full_lists
from .target import TargetGraph, associated_bipartite, build_ht, find_predators

FAMILIES = ("sabc", "ptfree", "bipartite-consistent", "ht", "sttt-sep")


class CorpusError(LabError):
    """Rejection budget exhausted while generating a corpus."""


# ---------------------------------------------------------------------------
# targets and lists


def random_target(rng: random.Random, k_min: int = 2, k_max: int = 6, loop_p: float = 0.3, edge_p: float = 0.45,
                  predator_free: bool = True, max_tries: int = 10_000) -> TargetGraph:
    for _ in range(max_tries):
        k = rng.randint(k_min, k_max)
        edges = [e for e in combinations(range(k), 2) if rng.random() < edge_p]
        loops = [v for v in range(k) if rng.random() < loop_p]
        h = TargetGraph(Graph(k, edges, loops))
        if not predator_free or not find_predators(h, limit=1):
            return h
    raise CorpusError("no predator-free target found")


def random_lists(rng: random.Random, colours, n: int, p: float = 0.6) -> list:
    colours = sorted(colours)
    out = []
    for _ in range(n):
        lst = frozenset(a for a in colours if rng.random() < p)
        out.append(lst or frozenset([rng.choice(colours)]))
    return out


def planted_homomorphism(rng: random.Random, h: TargetGraph, g: Graph):
    """Some homomorphism G -> H with full lists, found under a random relabelling of H."""
    from .oracle import solve_brute

    perm = list(range(h.n))
    rng.shuffle(perm)
    hp = TargetGraph(Graph(h.n, [(perm[a], perm[b]) for a, b in h.graph.edges], [perm[a] for a in h.graph.loops]))
    res = solve_brute(full_lists(hp, g), budget=None)
    if not res.answer:
        return None
    back = {perm[a]: a for a in range(h.n)}
    return tuple(back[x] for x in res.witness)


# ---------------------------------------------------------------------------
# graphs


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(n, [e for e in combinations(range(n), 2) if rng.random() < p])


def is_ptfree(g: Graph, t: int, node_cap: int | None = None) -> bool:
    return longest_induced_path_at_least(g, t, node_cap) is None


def is_sabc_k3_free(g: Graph, claw, node_cap: int | None = None) -> bool:
    if contains_induced(g, triangle_pattern(), node_cap) is not None:
        return False
    return contains_induced(g, claw_pattern(*claw), node_cap) is None


def substitute(skeleton: Graph, parts) -> Graph:
    """Replace vertex i of ``skeleton`` by the graph ``parts[i]`` (a module)."""
    offs, n = [], 0
    for p in parts:
        offs.append(n)
        n += p.order
    edges = []
    for i, p in enumerate(parts):
        edges += [(u + offs[i], v + offs[i]) for u, v in p.edges]
    for i, j in skeleton.edges:
        for u in range(parts[i].order):
            for v in range(parts[j].order):
                edges.append((u + offs[i], v + offs[j]))
    return Graph(n, edges)


def _small_ptfree(rng, n, t, p, max_tries):
    for _ in range(max_tries):
        g = random_graph(rng, n, p)
        if n < t or is_ptfree(g, t):
            return g
    raise CorpusError(f"no P{t}-free graph on {n} vertices found")


def random_ptfree_graph(rng: random.Random, n: int, t: int, p: float = 0.5, block: int = 5,
                        max_tries: int = 1000) -> Graph:
    """Random P_t-free graph.

    For t >= 4 the path P_t has no non-trivial module, so substituting
    P_t-free graphs into the vertices of a P_t-free skeleton stays P_t-free;
    large graphs are built that way from small rejection-sampled blocks.
    """
    if t <= 2:
        return Graph(n)
    if t == 3:
        # disjoint union of cliques
        k = rng.randint(1, n)
        label = [rng.randrange(k) for _ in range(n)]
        return Graph(n, [(u, v) for u, v in combinations(range(n), 2) if label[u] == label[v]])
    if n <= block:
        return _small_ptfree(rng, n, t, p, max_tries)
    k = rng.randint(2, min(block, n))
    skeleton = _small_ptfree(rng, k, t, p, max_tries)
    cuts = sorted(rng.sample(range(1, n), k - 1))
    sizes = [b - a for a, b in zip([0] + cuts, cuts + [n])]
    parts = [random_ptfree_graph(rng, s, t, p, block, max_tries) for s in sizes]
    g = substitute(skeleton, parts)
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph(n, [(perm[u], perm[v]) for u, v in g.edges])


def random_sabc_free_graph(rng: random.Random, n: int, claw=(2, 2, 2), p: float = 0.3,
                           max_degree: int | None = None, node_cap: int | None = None) -> Graph:
    """Random triangle-free graph, then edges of induced S_{a,b,c} copies are
    removed until none is left (each check is exact)."""
    pairs = list(combinations(range(n), 2))
    rng.shuffle(pairs)
    adj = [set() for _ in range(n)]
    for u, v in pairs:
        if rng.random() >= p or adj[u] & adj[v]:
            continue
        if max_degree is not None and (len(adj[u]) >= max_degree or len(adj[v]) >= max_degree):
            continue
        adj[u].add(v)
        adj[v].add(u)
    pattern = claw_pattern(*claw)
    while True:
        g = Graph(n, [(u, v) for u in range(n) for v in adj[u] if u < v])
        emb = contains_induced(g, pattern, node_cap)
        if emb is None:
            return g
        inside = [(emb[a], emb[b]) for a, b in pattern_graph_edges(pattern)]
        u, v = rng.choice(inside)
        adj[u].discard(v)
        adj[v].discard(u)


def pattern_graph_edges(pattern) -> list:
    from .graph import materialize_pattern

    return sorted(materialize_pattern(pattern).edges)


def cycle_blowup(k: int, sizes) -> Graph:
    """C_k with vertex i replaced by an independent set of size sizes[i]."""
    return substitute(cycle_graph(k), [Graph(s) for s in sizes])


def cycle_with_pendant_paths(k: int, pendants: dict) -> Graph:
    """C_k plus, for each ``i -> length``, a path of that many vertices hanging from i."""
    edges = list(cycle_graph(k).edges)
    n = k
    for i, ln in sorted(pendants.items()):
        prev = i
        for _ in range(ln):
            edges.append((prev, n))
            prev = n
            n += 1
    return Graph(n, edges)


def random_spider_tree(rng: random.Random, n: int, leg_max: int, max_degree: int) -> Graph:
    """Caterpillar-like tree: a spine with legs of length at most ``leg_max``."""
    spine = max(2, n // (leg_max + 1))
    edges = [(i, i + 1) for i in range(spine - 1)]
    deg = [(i > 0) + (i < spine - 1) for i in range(spine)]
    v = spine
    while v < n:
        i = rng.randrange(spine)
        if deg[i] >= max_degree:
            if all(d >= max_degree for d in deg):
                break
            continue
        ln = min(rng.randint(1, leg_max), n - v)
        prev = i
        for _ in range(ln):
            edges.append((prev, v))
            prev = v
            v += 1
        deg[i] += 1
    return Graph(v, edges)


def separator_test_graph(rng: random.Random, t: int, n_max: int = 60, max_degree: int = 8) -> Graph:
    """Connected {S_{t,t,t}, K3}-free graph with max degree <= max_degree.

    Drawn from a mixture: long cycles, cycles with short pendant paths,
    cycle blow-ups with independent modules, trees with short legs and
    repaired random triangle-free graphs."""
    if n_max < 4:
        raise InvalidInput("separator test graphs need n_max >= 4")
    kind = rng.randrange(5)
    if kind == 0:
        g = cycle_graph(rng.randint(4, n_max))
    elif kind == 1:
        k = rng.randint(min(6, n_max), max(min(6, n_max), n_max // 2))
        room = n_max - k
        pend = {}
        for i in rng.sample(range(k), rng.randint(1, min(k, 6))):
            ln = rng.randint(1, t - 1) if t > 1 else 0
            if ln and room >= ln:
                pend[i] = ln
                room -= ln
        g = cycle_with_pendant_paths(k, pend)
    elif kind == 2:
        cap = max(1, max_degree // 2)
        k = rng.randint(4, max(4, min(24, n_max // 2)))
        sizes = [rng.randint(1, min(4, cap)) for _ in range(k)]
        while sum(sizes) > n_max:
            sizes[sizes.index(max(sizes))] -= 1
        g = cycle_blowup(k, sizes)
    elif kind == 3:
        g = random_spider_tree(rng, rng.randint(min(8, n_max), n_max), t - 1 if t > 1 else 1, max_degree)
    else:
        g = random_sabc_free_graph(rng, rng.randint(min(10, n_max), n_max), (t, t, t), p=0.08, max_degree=max_degree)
        comps = sorted(_components(g), key=len, reverse=True)
        g, _ = g.induced(comps[0])
    return g


def _components(g: Graph) -> list:
    from .graph import components

    return components(g)


# ---------------------------------------------------------------------------
# corpus specs


@dataclass
class CorpusSpec:
    family: str
    count: int = 10
    seed: int = 0
    n_min: int = 4
    n_max: int = 12
    t: int = 5
    claw: tuple = (2, 2, 2)
    k_min: int = 2
    k_max: int = 6
    loop_p: float = 0.3
    edge_p: float = 0.5
    list_p: float = 0.6
    plant: float = 0.0
    max_degree: int | None = None
    connected: bool = False
    max_tries: int = 2000
    target: dict | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidInput(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        self.claw = tuple(self.claw)
        if self.n_min > self.n_max or self.n_min < 1:
            raise InvalidInput("need 1 <= n_min <= n_max")


def corpus_spec_from_dict(d: dict) -> CorpusSpec:
    known = set(CorpusSpec.__dataclass_fields__)
    bad = set(d) - known
    if bad:
        raise InvalidInput(f"unknown corpus keys {sorted(bad)}")
    if "family" not in d:
        raise InvalidInput("corpus spec needs a family")
    return CorpusSpec(**d)


@dataclass
class CorpusItem:
    name: str
    family: str
    instance: Instance
    meta: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "family": self.family, "meta": self.meta, **self.instance.to_dict()}


def _fixed_target(spec: CorpusSpec):
    if spec.target is None:
        return None
    from .target import target_from_dict

    return target_from_dict(spec.target)


def _draw(spec: CorpusSpec, rng: random.Random):
    n = rng.randint(spec.n_min, spec.n_max)
    fam = spec.family
    fixed = _fixed_target(spec)
    if fam == "ht":
        h = build_ht(spec.t)
        for _ in range(spec.max_tries):
            g = random_ptfree_graph(rng, n, spec.t, spec.edge_p)
            if g.is_connected():
                return full_lists(h, g), {"t": spec.t}
        raise CorpusError("no connected P_t-free graph found")
    if fam == "bipartite-consistent":
        base = fixed or random_target(rng, spec.k_min, spec.k_max, spec.loop_p, predator_free=False)
        sm = associated_bipartite(base)
        left = rng.randint(1, max(1, n - 1))
        edges = [(u, v) for u in range(left) for v in range(left, n) if rng.random() < spec.edge_p]
        g = Graph(n, edges)
        primes = [x for x in range(sm.star.n) if sm.is_prime(x)]
        seconds = [x for x in range(sm.star.n) if not sm.is_prime(x)]
        lists = random_lists(rng, primes, left, spec.list_p) + random_lists(rng, seconds, n - left, spec.list_p)
        return Instance(sm.star, g, lists), {"base_target": base.to_dict()}
    h = fixed or random_target(rng, spec.k_min, spec.k_max, spec.loop_p)
    if fam == "ptfree":
        g = random_ptfree_graph(rng, n, spec.t, spec.edge_p)
        meta = {"t": spec.t}
    elif fam == "sabc":
        g = random_sabc_free_graph(rng, n, spec.claw, spec.edge_p, spec.max_degree)
        meta = {"claw": list(spec.claw)}
    else:
        g = separator_test_graph(rng, spec.t, spec.n_max, spec.max_degree or 8)
        meta = {"t": spec.t, "max_degree": spec.max_degree or 8}
    lists = random_lists(rng, range(h.n), g.order, spec.list_p)
    if spec.plant and rng.random() < spec.plant:
        hom = planted_homomorphism(rng, h, g)
        if hom is not None:
            lists = [l | {hom[v]} for v, l in enumerate(lists)]
            meta["planted"] = list(hom)
    return Instance(h, g, lists), meta


def check_member(spec: CorpusSpec, inst: Instance) -> bool:
    """Family check applied to every emitted instance."""
    g = inst.graph
    if spec.connected and not g.is_connected():
        return False
    fam = spec.family
    if fam in ("ptfree", "ht"):
        return is_ptfree(g, spec.t) and (fam != "ht" or g.is_connected())
    if fam == "sabc":
        return is_sabc_k3_free(g, spec.claw)
    if fam == "sttt-sep":
        t = spec.t
        d = spec.max_degree or 8
        return g.is_connected() and g.max_degree() <= d and is_sabc_k3_free(g, (t, t, t))
    if fam == "bipartite-consistent":
        from .instance import is_consistent

        return is_consistent(inst) is not None
    return False


def generate_corpus(spec: CorpusSpec | dict, out_dir: str | None = None) -> list:
    """Draw ``spec.count`` instances; write ``<family>_<i>.json`` files when ``out_dir`` is given."""
    if isinstance(spec, dict):
        spec = corpus_spec_from_dict(spec)
    rng = random.Random(spec.seed)
    items = []
    tries = 0
    while len(items) < spec.count:
        tries += 1
        if tries > spec.max_tries * max(1, spec.count):
            raise CorpusError(f"rejection budget exhausted after {len(items)} instances")
        inst, meta = _draw(spec, rng)
        if not check_member(spec, inst):
            continue
        items.append(CorpusItem(f"{spec.family}_{len(items):04d}", spec.family, inst, {**meta, "seed": spec.seed}))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for it in items:
            with open(os.path.join(out_dir, it.name + ".json"), "w") as fh:
                fh.write(json.dumps(it.to_dict(), sort_keys=True, indent=1) + "\n")
    return items
