"""Immutable simple graphs with optional loops, forbidden patterns and
induced-structure searches.

Vertices are always ``0..n-1``.  Edges are unordered pairs of distinct
vertices stored as ``(u, v)`` with ``u < v``; loops are kept in a separate
set.  ``nbhd(v)`` follows the homomorphism convention and contains ``v``
itself exactly when ``v`` carries a loop.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInput, SearchCapExceeded

PATTERN_PARAM_CAP = 64


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


class Graph:
    """Immutable graph on ``0..order-1``."""

    __slots__ = ("order", "edges", "loops", "_adj", "_mask", "_hash")

    def __init__(self, order: int, edges: Iterable[Sequence[int]] = (), loops: Iterable[int] = ()):
        if not isinstance(order, int) or order < 0:
            raise InvalidInput(f"order must be a non-negative integer, got {order!r}")
        norm = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise InvalidInput(f"edge ({u}, {v}) is a loop; pass loops separately")
            if not (0 <= u < order and 0 <= v < order):
                raise InvalidInput(f"edge ({u}, {v}) out of range for order {order}")
            norm.add((u, v) if u < v else (v, u))
        lp = set()
        for v in loops:
            v = int(v)
            if not 0 <= v < order:
                raise InvalidInput(f"loop at {v} out of range for order {order}")
            lp.add(v)
        adj = [set() for _ in range(order)]
        for u, v in norm:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "edges", frozenset(norm))
        object.__setattr__(self, "loops", frozenset(lp))
        object.__setattr__(self, "_adj", tuple(frozenset(a) for a in adj))
        object.__setattr__(self, "_mask", tuple(mask_of(a) for a in adj))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    # basic queries
    def vertices(self) -> range:
        return range(self.order)

    def neighbors(self, v: int) -> frozenset:
        """Open neighbourhood, never containing ``v``."""
        return self._adj[v]

    def nbhd(self, v: int) -> frozenset:
        """Neighbourhood with ``v`` included iff ``v`` has a loop."""
        if v in self.loops:
            return self._adj[v] | {v}
        return self._adj[v]

    def closed(self, v: int) -> frozenset:
        return self._adj[v] | {v}

    def adj_mask(self, v: int) -> int:
        return self._mask[v]

    @property
    def masks(self) -> tuple:
        return self._mask

    def has_edge(self, u: int, v: int) -> bool:
        if u == v:
            return u in self.loops
        return v in self._adj[u]

    def has_loop(self, v: int) -> bool:
        return v in self.loops

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self._adj), default=0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> list:
        return sorted(self.edges)

    def is_loopless(self) -> bool:
        return not self.loops

    def is_reflexive(self) -> bool:
        return len(self.loops) == self.order

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list]:
        """Induced subgraph, renumbered in increasing order of the kept vertices."""
        keep = sorted(set(vertices))
        idx = {v: i for i, v in enumerate(keep)}
        edges = [(idx[u], idx[v]) for u, v in self.edges if u in idx and v in idx]
        loops = [idx[v] for v in self.loops if v in idx]
        return Graph(len(keep), edges, loops), keep

    def without_loops(self) -> "Graph":
        return Graph(self.order, self.edges)

    def is_connected(self) -> bool:
        return self.order <= 1 or len(components(self)) == 1

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Graph)
            and self.order == other.order
            and self.edges == other.edges
            and self.loops == other.loops
        )

    def __hash__(self) -> int:
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.order, self.edges, self.loops)))
        return self._hash

    def __repr__(self) -> str:
        lp = f", loops={sorted(self.loops)}" if self.loops else ""
        return f"Graph(n={self.order}, m={len(self.edges)}{lp})"

    def to_dict(self) -> dict:
        return {
            "n": self.order,
            "edges": [list(e) for e in self.sorted_edges()],
            "loops": sorted(self.loops),
        }


# ---------------------------------------------------------------------------
# small constructors


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int, reflexive: bool = False) -> Graph:
    if n < 3:
        raise InvalidInput("cycles need at least 3 vertices")
    loops = range(n) if reflexive else ()
    return Graph(n, [(i, (i + 1) % n) for i in range(n)], loops)


def complete_graph(n: int, reflexive: bool = False) -> Graph:
    loops = range(n) if reflexive else ()
    return Graph(n, combinations(range(n), 2), loops)


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def disjoint_union(*graphs: Graph) -> tuple[Graph, list]:
    """Disjoint union; returns the graph and the offset of each part."""
    edges, loops, offsets = [], [], []
    off = 0
    for g in graphs:
        offsets.append(off)
        edges.extend((u + off, v + off) for u, v in g.edges)
        loops.extend(v + off for v in g.loops)
        off += g.order
    return Graph(off, edges, loops), offsets


# ---------------------------------------------------------------------------
# components


def component_masks(masks: Sequence[int], allowed: int) -> list:
    """Connected components of the subgraph induced by ``allowed`` (bitmask form)."""
    comps = []
    rest = allowed
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= masks[v]
            nxt &= rest & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rest &= ~comp
    return comps


def components(g: Graph, vertices: Iterable[int] | None = None) -> list:
    """Components as sorted vertex lists, ordered by their smallest vertex."""
    allowed = (1 << g.order) - 1 if vertices is None else mask_of(vertices)
    return [sorted(iter_bits(c)) for c in component_masks(g.masks, allowed)]


def closed_nbhd_mask(g: Graph, vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= g.masks[v] | (1 << v)
    return m


def bipartition(g: Graph) -> tuple | None:
    """Canonical 2-colouring (BFS from the smallest vertex of each component).

    Returns ``(X, Y)`` as frozensets, or None if ``g`` is not bipartite.
    Loops make a graph non-bipartite.
    """
    if g.loops:
        return None
    side = [-1] * g.order
    for s in range(g.order):
        if side[s] >= 0:
            continue
        side[s] = 0
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if side[w] < 0:
                    side[w] = 1 - side[u]
                    stack.append(w)
                elif side[w] == side[u]:
                    return None
    x = frozenset(v for v in range(g.order) if side[v] == 0)
    return x, frozenset(range(g.order)) - x


# ---------------------------------------------------------------------------
# forbidden patterns


@dataclass(frozen=True)
class Pattern:
    """A named forbidden induced subgraph.

    ``kind`` is one of ``path``, ``claw``, ``triangle``, ``cycle_tail``,
    ``cycle_triangle_tail`` or ``custom``.
    """

    kind: str
    params: tuple = ()
    graph: Graph | None = None

    @property
    def name(self) -> str:
        if self.kind == "path":
            return f"P{self.params[0]}"
        if self.kind == "claw":
            return "S{},{},{}".format(*self.params)
        if self.kind == "triangle":
            return "K3"
        if self.kind == "cycle_tail":
            return "Bp{},{}".format(*self.params)
        if self.kind == "cycle_triangle_tail":
            return "Bt{},{}".format(*self.params)
        return "custom"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "params": list(self.params)}
        if self.graph is not None:
            d["graph"] = self.graph.to_dict()
        return d


def _check_param(x, lo, name):
    if not isinstance(x, int) or x < lo or x > PATTERN_PARAM_CAP:
        raise InvalidInput(f"{name}={x!r} outside [{lo}, {PATTERN_PARAM_CAP}]")


def path_pattern(t: int) -> Pattern:
    _check_param(t, 1, "t")
    return Pattern("path", (t,))


def claw_pattern(a: int, b: int, c: int) -> Pattern:
    for x, nm in ((a, "a"), (b, "b"), (c, "c")):
        _check_param(x, 0, nm)
    return Pattern("claw", (a, b, c))


def triangle_pattern() -> Pattern:
    return Pattern("triangle")


def cycle_tail_pattern(k: int, t: int) -> Pattern:
    """Cycle on ``k`` vertices with a pendant path of ``t`` vertices."""
    _check_param(k, 3, "k")
    _check_param(t, 1, "t")
    return Pattern("cycle_tail", (k, t))


def cycle_triangle_tail_pattern(k: int, t: int) -> Pattern:
    """Cycle on ``k`` vertices with a ``t``-vertex path whose end sees two consecutive cycle vertices."""
    _check_param(k, 3, "k")
    _check_param(t, 1, "t")
    return Pattern("cycle_triangle_tail", (k, t))


def custom_pattern(g: Graph) -> Pattern:
    if g.loops:
        raise InvalidInput("patterns must be loopless")
    return Pattern("custom", (), g)


def parse_pattern(text: str) -> Pattern:
    """Parse ``P5``, ``S1,2,3``, ``K3``, ``Bp7,3`` or ``Bt7,3``."""
    s = text.strip()
    try:
        if s.upper() == "K3":
            return triangle_pattern()
        if s[:2] in ("Bp", "Bt"):
            k, t = (int(x) for x in s[2:].split(","))
            return cycle_tail_pattern(k, t) if s[:2] == "Bp" else cycle_triangle_tail_pattern(k, t)
        if s[0] in "Pp":
            return path_pattern(int(s[1:]))
        if s[0] in "Ss":
            a, b, c = (int(x) for x in s[1:].split(","))
            return claw_pattern(a, b, c)
    except ValueError as exc:
        raise InvalidInput(f"cannot parse pattern {text!r}") from exc
    raise InvalidInput(f"cannot parse pattern {text!r}")


def materialize_pattern(p: Pattern) -> Graph:
    if p.kind == "path":
        return path_graph(p.params[0])
    if p.kind == "claw":
        edges = []
        nxt = 1
        for length in p.params:
            prev = 0
            for _ in range(length):
                edges.append((prev, nxt))
                prev = nxt
                nxt += 1
        return Graph(nxt, edges)
    if p.kind == "triangle":
        return complete_graph(3)
    if p.kind in ("cycle_tail", "cycle_triangle_tail"):
        k, t = p.params
        edges = [(i, (i + 1) % k) for i in range(k)]
        edges += [(k + i, k + i + 1) for i in range(t - 1)]
        edges.append((0, k))
        if p.kind == "cycle_triangle_tail":
            edges.append((1, k))
        return Graph(k + t, edges)
    if p.kind == "custom":
        return p.graph
    raise InvalidInput(f"unknown pattern kind {p.kind!r}")


# ---------------------------------------------------------------------------
# induced subgraph search


def _search_order(pg: Graph) -> list:
    order, seen = [], set()
    for comp in components(pg):
        start = max(comp, key=lambda v: (pg.degree(v), -v))
        queue = [start]
        seen.add(start)
        while queue:
            v = queue.pop(0)
            order.append(v)
            for w in sorted(pg.neighbors(v), key=lambda w: (-pg.degree(w), w)):
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
    return order


def contains_induced(host: Graph, pattern, node_cap: int | None = None):
    """Find an induced copy of ``pattern`` in ``host``.

    Returns a tuple ``phi`` with ``phi[p]`` the host vertex of pattern
    vertex ``p``, or None.  Loops on the host are ignored.  When
    ``node_cap`` search nodes are exceeded, SearchCapExceeded is raised.
    """
    pg = materialize_pattern(pattern) if isinstance(pattern, Pattern) else pattern
    if pg.loops:
        raise InvalidInput("patterns must be loopless")
    k = pg.order
    if k == 0:
        return ()
    if k > host.order:
        return None
    order = _search_order(pg)
    pos = {v: i for i, v in enumerate(order)}
    # for every pattern vertex: earlier neighbours / earlier non-neighbours (by position)
    prev_adj = []
    prev_non = []
    for i, p in enumerate(order):
        prev_adj.append([j for j in range(i) if order[j] in pg.neighbors(p)])
        prev_non.append([j for j in range(i) if order[j] not in pg.neighbors(p)])
    hmask = host.masks
    full = (1 << host.order) - 1
    image = [0] * k
    nodes = 0

    def rec(i: int, used: int) -> bool:
        nonlocal nodes
        if i == k:
            return True
        cand = full & ~used
        for j in prev_adj[i]:
            cand &= hmask[image[j]]
        for j in prev_non[i]:
            cand &= ~hmask[image[j]]
        while cand:
            low = cand & -cand
            cand ^= low
            nodes += 1
            if node_cap is not None and nodes > node_cap:
                raise SearchCapExceeded(f"induced search exceeded {node_cap} nodes", nodes, node_cap)
            image[i] = low.bit_length() - 1
            if rec(i + 1, used | low):
                return True
        return False

    if not rec(0, 0):
        return None
    phi = [0] * k
    for i, p in enumerate(order):
        phi[p] = image[i]
    del pos
    return tuple(phi)


def is_free_of(host: Graph, patterns: Iterable, node_cap: int | None = None) -> tuple:
    """Return ``(True, None)`` or ``(False, (pattern, embedding))``."""
    for p in patterns:
        emb = contains_induced(host, p, node_cap)
        if emb is not None:
            return False, (p, emb)
    return True, None


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    """Backtracking isomorphism test for small loopless graphs."""
    if g1.order != g2.order or g1.num_edges != g2.num_edges or len(g1.loops) != len(g2.loops):
        return False
    if sorted(g1.degree(v) for v in g1.vertices()) != sorted(g2.degree(v) for v in g2.vertices()):
        return False
    if g1.loops or g2.loops:
        raise InvalidInput("is_isomorphic supports loopless graphs only")
    return contains_induced(g2, g1) is not None


# ---------------------------------------------------------------------------
# induced paths and cycles


def enumerate_induced_paths(g: Graph, endpoints: tuple | None = None, max_vertices: int | None = None):
    """Yield induced paths as vertex tuples.

    Every undirected path is reported once, oriented so that its first
    vertex is smaller than its last.  Single vertices count as paths.
    With ``endpoints=(u, w)`` only paths whose endpoint set is ``{u, w}``
    are produced.
    """
    n = g.order
    cap = n if max_vertices is None else min(max_vertices, n)
    if cap < 1:
        return
    masks = g.masks
    goal = None
    if endpoints is not None:
        u, w = endpoints
        if u == w:
            yield (u,)
            return
        starts = [min(u, w)]
        goal = max(u, w)
    else:
        starts = range(n)

    for s in starts:
        if goal is None:
            yield (s,)
        path = [s]

        def rec(last: int, blocked: int):
            # blocked: closed neighbourhoods of every path vertex except ``last``
            new_blocked = blocked | masks[last] | (1 << last)
            for w in iter_bits(masks[last] & ~blocked & ~(1 << last)):
                path.append(w)
                if goal is None:
                    if w > s:
                        yield tuple(path)
                    if len(path) < cap:
                        yield from rec(w, new_blocked)
                elif w == goal:
                    yield tuple(path)
                elif len(path) < cap and not (new_blocked >> goal) & 1:
                    yield from rec(w, new_blocked)
                path.pop()

        yield from rec(s, 0)


def longest_induced_path_at_least(g: Graph, t: int, node_cap: int | None = None):
    """Return an induced path with ``t`` vertices, or None if there is none.

    Exhaustive depth-first search over induced paths (bitmask based).
    """
    if t <= 0:
        return ()
    if t > g.order:
        return None
    masks = g.masks
    nodes = 0
    path = []

    def rec(last: int, blocked: int, start: int) -> bool:
        nonlocal nodes
        if len(path) == t:
            return True
        cand = masks[last] & ~blocked
        while cand:
            low = cand & -cand
            cand ^= low
            w = low.bit_length() - 1
            nodes += 1
            if node_cap is not None and nodes > node_cap:
                raise SearchCapExceeded(f"induced path search exceeded {node_cap} nodes", nodes, node_cap)
            path.append(w)
            if rec(w, blocked | masks[last] | (1 << last) | low, start):
                return True
            path.pop()
        return False

    for s in range(g.order):
        path[:] = [s]
        if rec(s, 1 << s, s):
            return tuple(path)
    return None


def iter_induced_cycles(g: Graph, min_len: int = 3, max_len: int | None = None):
    """Generate induced cycles in nondecreasing length (lexicographic within a length).

    Each cycle is a tuple starting at its smallest vertex, oriented so that
    the second vertex is smaller than the last.
    """
    n = g.order
    masks = g.masks
    top = n if max_len is None else min(max_len, n)
    for length in range(max(3, min_len), top + 1):
        found = []
        for s in range(n):
            higher = ~((1 << (s + 1)) - 1)
            path = [s]

            def rec(last: int, blocked: int, used: int):
                # blocked: closed nbhds of the path vertices strictly between s and last
                cand = masks[last] & higher & ~blocked & ~used
                for w in iter_bits(cand):
                    if len(path) >= 2 and (masks[w] >> s) & 1:
                        if len(path) + 1 == length and path[1] < w:
                            found.append(tuple(path) + (w,))
                        continue
                    if len(path) + 1 < length:
                        extra = 0 if len(path) == 1 else (masks[last] | (1 << last))
                        path.append(w)
                        rec(w, blocked | extra, used | (1 << w))
                        path.pop()

            rec(s, 0, 1 << s)
        found.sort()
        yield from found


def enumerate_induced_cycles(g: Graph, min_len: int = 3, cap: int | None = None, max_len: int | None = None):
    """Induced cycles in nondecreasing length as ``(cycles, truncated)``.

    ``cap`` bounds the number of cycles returned; ``truncated`` is True when
    the cap stopped the enumeration.
    """
    out = []
    for c in iter_induced_cycles(g, min_len, max_len):
        if cap is not None and len(out) >= cap:
            return out, True
        out.append(c)
    return out, False


# ---------------------------------------------------------------------------
# line graphs


def line_graph(g: Graph) -> tuple[Graph, dict]:
    """Line graph plus the map from each edge ``(u, v)`` (u < v) to its vertex."""
    if g.loops:
        raise InvalidInput("line graphs are defined for loopless graphs only")
    es = g.sorted_edges()
    index = {e: i for i, e in enumerate(es)}
    incident = [[] for _ in range(g.order)]
    for i, (u, v) in enumerate(es):
        incident[u].append(i)
        incident[v].append(i)
    ledges = set()
    for inc in incident:
        for a, b in combinations(inc, 2):
            ledges.add((a, b))
    return Graph(len(es), ledges), index


# ---------------------------------------------------------------------------
# serialisation


def graph_from_dict(d: dict) -> Graph:
    try:
        n = d["n"]
        edges = d.get("edges", [])
        loops = d.get("loops", [])
    except (TypeError, KeyError) as exc:
        raise InvalidInput(f"graph JSON needs 'n' and 'edges': {exc}") from exc
    seen = set()
    for e in edges:
        if len(e) != 2:
            raise InvalidInput(f"bad edge {e!r}")
        key = tuple(sorted(e))
        if key in seen:
            raise InvalidInput(f"duplicate edge {e!r}")
        seen.add(key)
    if len(set(loops)) != len(loops):
        raise InvalidInput("duplicate loop")
    return Graph(n, edges, loops)


def graph_to_json(g: Graph) -> str:
    return json.dumps(g.to_dict(), sort_keys=True)


def graph_from_json(text: str) -> Graph:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc
    return graph_from_dict(d)


def graph_to_edgelist(g: Graph) -> str:
    """Text format: ``p graph n m`` then ``e u v`` per edge, ``e v v`` per loop (0-based)."""
    lines = [f"p graph {g.order} {g.num_edges + len(g.loops)}"]
    lines += [f"e {u} {v}" for u, v in g.sorted_edges()]
    lines += [f"e {v} {v}" for v in sorted(g.loops)]
    return "\n".join(lines) + "\n"


def graph_from_edgelist(text: str) -> Graph:
    n = m = None
    edges, loops = [], []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] != "graph" or n is not None:
                raise InvalidInput(f"line {lineno}: bad header {line!r}")
            n, m = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if n is None or len(parts) != 3:
                raise InvalidInput(f"line {lineno}: bad edge line {line!r}")
            u, v = int(parts[1]), int(parts[2])
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InvalidInput(f"line {lineno}: duplicate edge {key}")
            seen.add(key)
            (loops.append(u) if u == v else edges.append(key))
        else:
            raise InvalidInput(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise InvalidInput("missing 'p graph' header")
    if m != len(seen):
        raise InvalidInput(f"header announces {m} edges, found {len(seen)}")
    return Graph(n, edges, loops)
