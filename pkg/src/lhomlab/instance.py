"""Instances of the list homomorphism problem, edge-list instances and the
transformations between them."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import InvalidInput, PreconditionError
from .graph import Graph, graph_from_dict, line_graph
from .target import StarMapping, TargetGraph, as_target


@dataclass(frozen=True)
class Instance:
    """``(H, G, L)``: target, loopless instance graph and one list per vertex."""

    target: TargetGraph
    graph: Graph
    lists: tuple

    def __post_init__(self):
        object.__setattr__(self, "lists", tuple(frozenset(x) for x in self.lists))

    @property
    def n(self) -> int:
        return self.graph.order

    def total_list_size(self) -> int:
        return sum(len(x) for x in self.lists)

    def list_product(self, stop_above: float | None = None) -> int:
        p = 1
        for x in self.lists:
            p *= len(x)
            if stop_above is not None and p > stop_above:
                return p
        return p

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "graph": self.graph.to_dict(),
            "lists": [sorted(x) for x in self.lists],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def full_lists(target, graph: Graph) -> Instance:
    target = as_target(target)
    return Instance(target, graph, [frozenset(range(target.n))] * graph.order)


@dataclass(frozen=True)
class EdgeInstance:
    """Instance whose lists sit on edges; solved through its line graph."""

    target: TargetGraph
    graph: Graph
    edge_lists: dict = field(hash=False)

    def __post_init__(self):
        norm = {}
        for (u, v), lst in self.edge_lists.items():
            key = (u, v) if u < v else (v, u)
            norm[key] = frozenset(lst)
        object.__setattr__(self, "edge_lists", norm)

    def to_dict(self) -> dict:
        return {
            "target": self.target.to_dict(),
            "graph": self.graph.to_dict(),
            "edge_lists": {f"{u}-{v}": sorted(lst) for (u, v), lst in sorted(self.edge_lists.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class Verdict:
    ok: bool
    message: str = "ok"
    where: object = None

    def __bool__(self):
        return self.ok


def validate(inst: Instance) -> Verdict:
    """Structural validation that reports instead of raising."""
    try:
        if not isinstance(inst.target, TargetGraph):
            return Verdict(False, "target is not a TargetGraph")
        if inst.graph.loops:
            return Verdict(False, "instance graph has loops", sorted(inst.graph.loops))
        if len(inst.lists) != inst.graph.order:
            return Verdict(False, f"{len(inst.lists)} lists for {inst.graph.order} vertices")
        for v, lst in enumerate(inst.lists):
            for a in lst:
                if not isinstance(a, int) or not 0 <= a < inst.target.n:
                    return Verdict(False, f"list of vertex {v} contains {a!r}, not a target vertex", v)
    except Exception as exc:  # validation must never raise
        return Verdict(False, f"malformed instance: {exc}")
    return Verdict(True)


def check_homomorphism(inst: Instance, h) -> Verdict:
    """Verify that ``h`` (sequence indexed by vertex) is a list homomorphism."""
    if h is None or len(h) != inst.n:
        return Verdict(False, "wrong length")
    for v in range(inst.n):
        if h[v] not in inst.lists[v]:
            return Verdict(False, f"vertex {v} coloured {h[v]} outside its list", v)
    for u, v in inst.graph.edges:
        if not inst.target.adjacent(h[u], h[v]):
            return Verdict(False, f"edge {u}-{v} mapped to non-edge {h[u]}-{h[v]}", (u, v))
    return Verdict(True)


def is_consistent(inst: Instance):
    """Side assignment witnessing consistency with the target bipartition.

    Returns a tuple ``side`` with ``L(v)`` contained in ``classes[side[v]]``
    and adjacent vertices on different sides, or None.
    """
    h = inst.target
    if h.classes is None:
        return None
    cls = h.classes
    g = inst.graph
    side = [-1] * g.order
    for s in range(g.order):
        if side[s] >= 0:
            continue
        comp = [s]
        colour = {s: 0}
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if w not in colour:
                    colour[w] = 1 - colour[u]
                    comp.append(w)
                    stack.append(w)
                elif colour[w] == colour[u]:
                    return None
        chosen = None
        for flip in (0, 1):
            if all(inst.lists[v] <= cls[colour[v] ^ flip] for v in comp):
                chosen = flip
                break
        if chosen is None:
            return None
        for v in comp:
            side[v] = colour[v] ^ chosen
    return tuple(side)


def lift_star_instance(inst: Instance, mapping: StarMapping) -> Instance:
    """Instance over H from a consistent instance over H*: L(v) = {a : a' or a'' in L'(v)}."""
    if inst.target != mapping.star:
        raise PreconditionError("instance target is not the star of the mapping")
    if is_consistent(inst) is None:
        raise PreconditionError("instance is not consistent with the bipartition of H*")
    n = mapping.base.n
    lists = [frozenset(x % n for x in lst) for lst in inst.lists]
    return Instance(mapping.base, inst.graph, lists)


def star_instance(inst: Instance, mapping: StarMapping, side) -> Instance:
    """Inverse direction: lists over H* from lists over H and a 2-colouring of G."""
    n = mapping.base.n
    lists = [frozenset(a + (n if side[v] else 0) for a in inst.lists[v]) for v in range(inst.n)]
    return Instance(mapping.star, inst.graph, lists)


def expand_edge_instance(einst: EdgeInstance) -> tuple[Instance, dict]:
    """Line graph instance; returns it with the edge -> vertex map."""
    lg, index = line_graph(einst.graph)
    lists = [None] * lg.order
    for e, i in index.items():
        if e not in einst.edge_lists:
            raise InvalidInput(f"edge {e} has no list")
        lists[i] = einst.edge_lists[e]
    return Instance(einst.target, lg, lists), index


# ---------------------------------------------------------------------------
# gluing helpers


def instance_union(*insts: Instance) -> tuple[Instance, list]:
    target = insts[0].target
    edges, lists, offsets = [], [], []
    off = 0
    for inst in insts:
        if inst.target != target:
            raise PreconditionError("all parts must share the target")
        offsets.append(off)
        edges.extend((u + off, v + off) for u, v in inst.graph.edges)
        lists.extend(inst.lists)
        off += inst.n
    return Instance(target, Graph(off, edges), lists), offsets


def identify_vertices(inst: Instance, groups) -> tuple[Instance, list]:
    """Merge each group of vertices into one (lists must agree).

    Returns the new instance and ``newid[v]`` for every old vertex.  The
    merged vertex keeps the position of the smallest member.
    """
    rep = list(range(inst.n))
    for grp in groups:
        grp = sorted(set(grp))
        base = inst.lists[grp[0]]
        for v in grp:
            if inst.lists[v] != base:
                raise PreconditionError(f"cannot identify vertices with lists {sorted(base)} and {sorted(inst.lists[v])}")
            rep[v] = grp[0]
    for v in range(inst.n):
        while rep[rep[v]] != rep[v]:
            rep[v] = rep[rep[v]]
    keep = sorted(set(rep))
    pos = {v: i for i, v in enumerate(keep)}
    newid = [pos[rep[v]] for v in range(inst.n)]
    edges = set()
    for u, v in inst.graph.edges:
        a, b = newid[u], newid[v]
        if a == b:
            raise PreconditionError(f"identification turns edge {u}-{v} into a loop")
        edges.add((min(a, b), max(a, b)))
    lists = [inst.lists[v] for v in keep]
    return Instance(inst.target, Graph(len(keep), edges), lists), newid


def add_edges(inst: Instance, new_edges) -> Instance:
    return Instance(inst.target, Graph(inst.n, list(inst.graph.edges) + list(new_edges)), inst.lists)


def edge_union(*parts: EdgeInstance) -> tuple[EdgeInstance, list]:
    target = parts[0].target
    edges, lists, offsets = [], {}, []
    off = 0
    for p in parts:
        offsets.append(off)
        for (u, v), lst in p.edge_lists.items():
            edges.append((u + off, v + off))
            lists[(u + off, v + off)] = lst
        off += p.graph.order
    return EdgeInstance(target, Graph(off, edges), lists), offsets


def _check_pending(einst: EdgeInstance, e):
    x, y = e
    if not einst.graph.has_edge(x, y):
        raise PreconditionError(f"{e} is not an edge")
    if einst.graph.degree(x) != 1:
        raise PreconditionError(f"{x} is not a degree-1 endpoint of {e}")
    return einst.edge_lists[(min(x, y), max(x, y))]


def glue_pending_edges(einst: EdgeInstance, e1, e2) -> tuple[EdgeInstance, list]:
    """Within one instance: drop the leaves x1, x2 of pending edges
    ``e1=(x1, y1)``, ``e2=(x2, y2)`` and add ``y1y2`` with their common list."""
    l1 = _check_pending(einst, e1)
    l2 = _check_pending(einst, e2)
    if l1 != l2:
        raise PreconditionError(f"pending edge lists differ: {sorted(l1)} vs {sorted(l2)}")
    x1, y1 = e1
    x2, y2 = e2
    if len({x1, y1, x2, y2}) != 4 or einst.graph.has_edge(y1, y2):
        raise PreconditionError("pending edges must be disjoint and their inner ends non-adjacent")
    keep = [v for v in range(einst.graph.order) if v not in (x1, x2)]
    pos = {v: i for i, v in enumerate(keep)}
    newid = [pos.get(v) for v in range(einst.graph.order)]
    edges, lists = [], {}
    for (u, v), lst in einst.edge_lists.items():
        if x1 in (u, v) or x2 in (u, v):
            continue
        a, b = newid[u], newid[v]
        edges.append((a, b))
        lists[(min(a, b), max(a, b))] = lst
    a, b = newid[y1], newid[y2]
    edges.append((a, b))
    lists[(min(a, b), max(a, b))] = l1
    return EdgeInstance(einst.target, Graph(len(keep), edges), lists), newid


def identify_pending_edges(i1: EdgeInstance, e1, i2: EdgeInstance, e2):
    """Glue two edge instances along pending edges ``e1 = (x1, y1)`` and ``e2 = (x2, y2)``.

    The leaves ``x1``, ``x2`` disappear and ``y1y2`` becomes an edge with
    the shared list.  Returns ``(instance, map1, map2)`` mapping old vertex
    ids of each part to new ids (None for the removed leaves).
    """
    if i1.target != i2.target:
        raise PreconditionError("instances have different targets")
    _check_pending(i1, e1)
    _check_pending(i2, e2)
    union, (o1, o2) = edge_union(i1, i2)
    glued, newid = glue_pending_edges(union, e1, (e2[0] + o2, e2[1] + o2))
    map1 = [newid[v + o1] for v in range(i1.graph.order)]
    map2 = [newid[v + o2] for v in range(i2.graph.order)]
    return glued, map1, map2


# ---------------------------------------------------------------------------
# serialisation


def instance_from_dict(d: dict) -> Instance:
    try:
        target = TargetGraph(graph_from_dict(d["target"]))
        graph = graph_from_dict(d["graph"])
        lists = d.get("lists")
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"instance JSON needs target, graph, lists: {exc}") from exc
    if lists is None:
        lists = [list(range(target.n))] * graph.order
    if len(lists) != graph.order:
        raise InvalidInput(f"{len(lists)} lists for {graph.order} vertices")
    for lst in lists:
        if len(set(lst)) != len(lst):
            raise InvalidInput(f"duplicate entry in list {lst!r}")
    inst = Instance(target, graph, [frozenset(x) for x in lists])
    v = validate(inst)
    if not v:
        raise InvalidInput(v.message)
    return inst


def instance_from_json(text: str) -> Instance:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"invalid JSON: {exc}") from exc
    return instance_from_dict(d)


def edge_instance_from_dict(d: dict) -> EdgeInstance:
    target = TargetGraph(graph_from_dict(d["target"]))
    graph = graph_from_dict(d["graph"])
    lists = {}
    for key, lst in d["edge_lists"].items():
        u, v = (int(x) for x in key.split("-"))
        if u >= v:
            raise InvalidInput(f"edge key {key!r} must be written u-v with u < v")
        lists[(u, v)] = frozenset(lst)
    if set(lists) != set(graph.edges):
        raise InvalidInput("edge_lists keys must match the graph edges")
    return EdgeInstance(target, graph, lists)
