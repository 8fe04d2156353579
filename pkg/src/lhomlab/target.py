"""Target graphs H: neighbourhood comparability, predators, the associated
bipartite graph, decompositions and classification flags."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .errors import InvalidInput, PreconditionError, SearchCapExceeded
from .graph import (
    Graph,
    bipartition,
    component_masks,
    components,
    enumerate_induced_cycles,
    iter_bits,
    mask_of,
)

EQUAL = "equal"
LEFT_SUBSET = "left_subset"
RIGHT_SUBSET = "right_subset"
INCOMPARABLE = "incomparable"

DECOMPOSITION_CAP = 14


class TargetGraph:
    """A target graph together with cached neighbourhood data.

    ``nbhd[v]`` is N(v) with ``v`` included when it has a loop.  When
    ``classes`` is given it fixes the bipartition used for consistency
    checks; otherwise the canonical 2-colouring is used.
    """

    def __init__(self, graph: Graph, classes: tuple | None = None):
        self.graph = graph
        self.n = graph.order
        self.nbhd = tuple(graph.nbhd(v) for v in range(self.n))
        self.nbhd_mask = tuple(mask_of(s) for s in self.nbhd)
        cmp = []
        for u in range(self.n):
            row = []
            for v in range(self.n):
                a, b = self.nbhd[u], self.nbhd[v]
                if a == b:
                    row.append(EQUAL)
                elif a < b:
                    row.append(LEFT_SUBSET)
                elif b < a:
                    row.append(RIGHT_SUBSET)
                else:
                    row.append(INCOMPARABLE)
            cmp.append(tuple(row))
        self.comparability = tuple(cmp)
        if classes is None:
            classes = bipartition(graph)
        self.classes = classes

    def __eq__(self, other):
        return isinstance(other, TargetGraph) and self.graph == other.graph

    def __hash__(self):
        return hash(self.graph)

    def __repr__(self):
        return f"TargetGraph({self.graph!r})"

    def adjacent(self, a: int, b: int) -> bool:
        return b in self.nbhd[a]

    def incomparable(self, a: int, b: int) -> bool:
        return self.comparability[a][b] == INCOMPARABLE

    def is_incomparable_set(self, s) -> bool:
        s = list(s)
        return all(self.incomparable(a, b) for a, b in combinations(s, 2))

    def complete_to(self, s, t) -> bool:
        return all(self.adjacent(a, b) for a in s for b in t)

    @property
    def is_bipartite(self) -> bool:
        return self.classes is not None

    def class_of(self, v: int) -> int | None:
        if self.classes is None:
            return None
        return 0 if v in self.classes[0] else 1

    def to_dict(self) -> dict:
        return self.graph.to_dict()


def build_target(g: Graph) -> TargetGraph:
    return TargetGraph(g)


def as_target(h) -> TargetGraph:
    return h if isinstance(h, TargetGraph) else TargetGraph(h)


# ---------------------------------------------------------------------------
# predators and triangles


def find_predators(h, limit: int | None = None) -> list:
    """All quadruples ``(a1, a2, b1, b2)`` with ``a1 < a2``, ``b1 < b2``,
    both pairs incomparable and ``{a1, a2}`` complete to ``{b1, b2}``."""
    h = as_target(h)
    pairs = [(a, b) for a, b in combinations(range(h.n), 2) if h.incomparable(a, b)]
    out = []
    for a1, a2 in pairs:
        common = h.nbhd[a1] & h.nbhd[a2]
        for b1, b2 in pairs:
            if b1 in common and b2 in common:
                out.append((a1, a2, b1, b2))
                if limit is not None and len(out) >= limit:
                    return out
    return out


def find_incomparable_c4(hb) -> list:
    """Predators of a bipartite target whose pairs lie in opposite classes."""
    hb = as_target(hb)
    if not hb.is_bipartite:
        raise PreconditionError("target is not bipartite")
    return [q for q in find_predators(hb) if hb.class_of(q[0]) == hb.class_of(q[1]) != hb.class_of(q[2])]


def find_simple_triangles(h) -> list:
    h = as_target(h)
    g = h.graph
    out = []
    for a, b, c in combinations(range(h.n), 3):
        if a in g.loops or b in g.loops or c in g.loops:
            continue
        if g.has_edge(a, b) and g.has_edge(b, c) and g.has_edge(a, c):
            out.append((a, b, c))
    return out


# ---------------------------------------------------------------------------
# associated bipartite graph


@dataclass(frozen=True)
class StarMapping:
    """H* with ``a' = prime_of[a] = a`` and ``a'' = doubleprime_of[a] = a + n``."""

    base: TargetGraph
    star: TargetGraph
    prime_of: tuple
    doubleprime_of: tuple

    def origin(self, x: int) -> int:
        return x % self.base.n

    def is_prime(self, x: int) -> bool:
        return x < self.base.n


def associated_bipartite(h) -> StarMapping:
    """H* : vertices a', a''; edge a'b'' iff ab is an edge of H (loops give a'a'')."""
    h = as_target(h)
    n = h.n
    edges = []
    for a in range(n):
        for b in h.nbhd[a]:
            edges.append((a, b + n))
    g = Graph(2 * n, edges)
    primes = frozenset(range(n))
    star = TargetGraph(g, (primes, frozenset(range(n, 2 * n))))
    return StarMapping(h, star, tuple(range(n)), tuple(range(n, 2 * n)))


# ---------------------------------------------------------------------------
# structural checks


def strong_split_partition(h):
    """``(P, B)`` with P the looped vertices forming a clique and B the
    loopless ones forming an independent set, or None."""
    h = as_target(h)
    g = h.graph
    p = sorted(g.loops)
    b = sorted(set(range(h.n)) - g.loops)
    if any(not g.has_edge(x, y) for x, y in combinations(p, 2)):
        return None
    if any(g.has_edge(x, y) for x, y in combinations(b, 2)):
        return None
    return tuple(p), tuple(b)


@dataclass(frozen=True)
class DecompositionTriple:
    d: frozenset
    n: frozenset
    r: frozenset

    def to_dict(self) -> dict:
        return {"D": sorted(self.d), "N": sorted(self.n), "R": sorted(self.r)}


def check_decomposition(h, triple: DecompositionTriple) -> tuple:
    """Verify a triple against the three defining conditions.  ``(ok, reason)``."""
    h = as_target(h)
    if h.classes is None:
        return False, "target is not bipartite"
    x, y = h.classes
    d, nn, r = triple.d, triple.n, triple.r
    if (d | nn | r) != frozenset(range(h.n)) or (d & nn) or (d & r) or (nn & r):
        return False, "not a partition"
    if not nn:
        return False, "N is empty"
    if not r:
        return False, "R is empty"
    g = h.graph
    if any(g.has_edge(u, v) for u in d for v in r):
        return False, "N does not separate D from R"
    if len(d & x) < 2 and len(d & y) < 2:
        return False, "D has fewer than two vertices in each class"
    if not h.complete_to((d | nn) & x, nn & y):
        return False, "(D u N) cap X not complete to N cap Y"
    if not h.complete_to((d | nn) & y, nn & x):
        return False, "(D u N) cap Y not complete to N cap X"
    return True, "ok"


def bipartite_decomposition(h, cap: int = DECOMPOSITION_CAP):
    """Exhaustive search for a decomposition (D, N, R) of a bipartite target.

    Returns a DecompositionTriple or None when the completed search shows
    that none exists.  N ranges over all vertex sets inducing a complete
    bipartite graph; given N, D may be any union of components of H - N
    whose vertices are complete to the opposite side of N.
    """
    h = as_target(h)
    if h.classes is None:
        raise PreconditionError("bipartite_decomposition needs a bipartite target")
    if h.n > cap:
        raise SearchCapExceeded(f"target has {h.n} vertices, cap is {cap}", h.n, cap)
    x, y = h.classes
    xm, ym = mask_of(x), mask_of(y)
    masks = h.graph.masks
    full = (1 << h.n) - 1
    best = None
    for nmask in range(1, full + 1):
        nx, ny = nmask & xm, nmask & ym
        # N must itself be complete bipartite
        ok = True
        for v in iter_bits(nx):
            if ny & ~masks[v]:
                ok = False
                break
        if not ok:
            continue
        eligible = 0
        for v in iter_bits(full & ~nmask):
            need = ny if (xm >> v) & 1 else nx
            if need & ~masks[v] == 0:
                eligible |= 1 << v
        comps = component_masks(masks, full & ~nmask)
        good = [c for c in comps if c & ~eligible == 0]
        if not good:
            continue
        if len(good) < len(comps):
            choices = [sum(good)]
        else:
            choices = [sum(good) - c for c in good]
        for dm in choices:
            if dm == 0:
                continue
            if bin(dm & xm).count("1") >= 2 or bin(dm & ym).count("1") >= 2:
                rm = full & ~nmask & ~dm
                cand = DecompositionTriple(
                    frozenset(iter_bits(dm)), frozenset(iter_bits(nmask)), frozenset(iter_bits(rm))
                )
                key = (len(cand.n), sorted(cand.n), sorted(cand.d))
                if best is None or key < best[0]:
                    best = (key, cand)
                break
    return None if best is None else best[1]


def is_interval_by_cliques(g: Graph) -> bool:
    """Brute-force interval test via consecutive ordering of maximal cliques (tiny graphs only)."""
    from itertools import permutations

    n = g.order
    if n == 0:
        return True
    cliques = []
    for m in range(1, 1 << n):
        vs = list(iter_bits(m))
        if all(g.has_edge(a, b) for a, b in combinations(vs, 2)):
            cliques.append(m)
    maximal = [c for c in cliques if not any(c != d and c & d == c for d in cliques)]
    for comp in components(g):
        cm = mask_of(comp)
        local = [c for c in maximal if c & cm]
        found = False
        for perm in permutations(local):
            good = True
            for v in comp:
                idx = [i for i, c in enumerate(perm) if (c >> v) & 1]
                if idx[-1] - idx[0] + 1 != len(idx):
                    good = False
                    break
            if good:
                found = True
                break
        if not found:
            return False
    return True


def find_asteroidal_triple(g: Graph):
    n = g.order
    masks = g.masks
    full = (1 << n) - 1
    for a, b, c in combinations(range(n), 3):
        if g.has_edge(a, b) or g.has_edge(b, c) or g.has_edge(a, c):
            continue
        good = True
        for p, q, z in ((a, b, c), (a, c, b), (b, c, a)):
            allowed = full & ~(masks[z] | (1 << z))
            comp = next((cm for cm in component_masks(masks, allowed) if (cm >> p) & 1), 0)
            if not (comp >> q) & 1:
                good = False
                break
        if good:
            return (a, b, c)
    return None


def reflexive_interval_check(h) -> dict:
    """Interval verdict for a reflexive target with a certificate.

    Non-interval verdicts carry an induced cycle of length >= 4 or an
    asteroidal triple of the underlying simple graph.
    """
    h = as_target(h)
    g = h.graph
    if not g.is_reflexive():
        raise PreconditionError("target is not reflexive")
    cycles, _ = enumerate_induced_cycles(g, 4, cap=1)
    if cycles:
        return {"interval": False, "witness": {"induced_cycle": list(cycles[0])}}
    at = find_asteroidal_triple(g)
    if at is not None:
        return {"interval": False, "witness": {"asteroidal_triple": list(at)}}
    return {"interval": True, "witness": None}


def minimal_non_interval_subgraph(h) -> tuple:
    """Greedy vertex deletion down to a minimal non-interval induced subgraph.

    Returns ``(TargetGraph, kept_vertices)``.
    """
    h = as_target(h)
    if reflexive_interval_check(h)["interval"]:
        raise PreconditionError("target is interval")
    keep = list(range(h.n))
    for v in range(h.n):
        trial = [u for u in keep if u != v]
        sub, _ = h.graph.induced(trial)
        if not reflexive_interval_check(TargetGraph(sub))["interval"]:
            keep = trial
    sub, _ = h.graph.induced(keep)
    return TargetGraph(sub), keep


def build_ht(t: int) -> TargetGraph:
    """Cycle 0..2t-1 plus a=2t, a'=2t+1, b=2t+2, b'=2t+3 with edges
    (t+1)a, tb, ab, aa', bb'."""
    if t < 3:
        raise InvalidInput("H_t needs t >= 3")
    m = 2 * t
    a, ap, b, bp = m, m + 1, m + 2, m + 3
    edges = [(i, (i + 1) % m) for i in range(m)]
    edges += [(t + 1, a), (t, b), (a, b), (a, ap), (b, bp)]
    return TargetGraph(Graph(m + 4, edges))


def ht_labels(t: int) -> dict:
    m = 2 * t
    return {"a": m, "a'": m + 1, "b": m + 2, "b'": m + 3}


# ---------------------------------------------------------------------------
# classification


@dataclass
class TargetReport:
    flags: dict = field(default_factory=dict)

    def value(self, name: str):
        return self.flags[name]["value"]

    def witness(self, name: str):
        return self.flags[name]["witness"]

    def to_dict(self) -> dict:
        return {"flags": self.flags}


def _flag(value, witness=None, attested="exhaustive"):
    return {"value": value, "witness": witness, "attested": attested}


def classify_target(h, decomposition_cap: int = DECOMPOSITION_CAP) -> TargetReport:
    h = as_target(h)
    g = h.graph
    rep = TargetReport()
    preds = find_predators(h, limit=1)
    rep.flags["predator_present"] = _flag(
        bool(preds), list(preds[0]) if preds else None, "single-factor approximation"
    )
    tri = find_simple_triangles(h)
    rep.flags["simple_triangle_present"] = _flag(bool(tri), list(tri[0]) if tri else None)
    looped = sorted(g.loops)
    pair = next(((a, b) for a, b in combinations(looped, 2) if h.incomparable(a, b)), None)
    rep.flags["incomparable_loop_pair_present"] = _flag(pair is not None, list(pair) if pair else None)
    triple = next((s for s in combinations(looped, 3) if h.is_incomparable_set(s)), None)
    rep.flags["incomparable_loop_triple_present"] = _flag(triple is not None, list(triple) if triple else None)
    rep.flags["reflexive"] = _flag(g.is_reflexive())
    rep.flags["irreflexive"] = _flag(not g.loops)
    split = strong_split_partition(h)
    rep.flags["strong_split"] = _flag(
        split is not None, {"P": list(split[0]), "B": list(split[1])} if split else None
    )
    rep.flags["bipartite"] = _flag(
        h.is_bipartite, [sorted(h.classes[0]), sorted(h.classes[1])] if h.is_bipartite else None
    )
    if h.is_bipartite:
        if h.n <= decomposition_cap:
            dec = bipartite_decomposition(h, decomposition_cap)
            rep.flags["undecomposable"] = _flag(dec is None, dec.to_dict() if dec else None)
        else:
            rep.flags["undecomposable"] = _flag(None, None, "skipped: over cap")
    else:
        rep.flags["undecomposable"] = _flag(None, None, "not applicable: target not bipartite")
    rep.flags["connected"] = _flag(g.is_connected(), [list(c) for c in components(g)])
    if g.is_reflexive():
        iv = reflexive_interval_check(h)
        rep.flags["interval"] = _flag(iv["interval"], iv["witness"])
    return rep


def target_from_dict(d: dict) -> TargetGraph:
    from .graph import graph_from_dict

    return TargetGraph(graph_from_dict(d))
