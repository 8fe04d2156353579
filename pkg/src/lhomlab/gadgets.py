"""Gadgets: small instances realising a prescribed relation on interface vertices.

Path gadgets are found by breadth-first search over transfer relations:
walking along a path with lists L_1, ..., L_k, the state after vertex i
is the set of pairs (colour of the first vertex, colour of vertex i) that
extend to a list homomorphism of the prefix.  Larger gadgets are glued
from verified paths.  Every gadget leaving this module has been checked
against the oracle.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product

from .errors import GadgetNotFound, InvalidInput, PreconditionError
from .graph import Graph, iter_bits, iter_induced_cycles, mask_of, path_graph
from .instance import (
    EdgeInstance,
    Instance,
    Verdict,
    expand_edge_instance,
    identify_vertices,
    instance_union,
)
from .oracle import project_relation
from .target import TargetGraph, as_target, associated_bipartite

PATH_CAP = 16
OR3_CAP = 14


# ---------------------------------------------------------------------------
# gadget kinds and target relations


@dataclass(frozen=True)
class GadgetSpec:
    """``kind`` is one of NEQ, OR3, IMPL, DIST, PATH.

    params: NEQ (S,), OR3 (a, b), IMPL (a1, a2, b1, b2),
    DIST (gamma, delta, a, b), PATH (start list, end list, relation).
    """

    kind: str
    params: tuple

    @property
    def arity(self) -> int:
        return 3 if self.kind == "OR3" else 2

    def interface_lists(self) -> list:
        p = self.params
        if self.kind == "NEQ":
            return [frozenset(p[0])] * 2
        if self.kind == "OR3":
            return [frozenset(p)] * 3
        if self.kind == "IMPL":
            return [frozenset(p[:2]), frozenset(p[2:])]
        if self.kind == "DIST":
            return [frozenset(p[2:]), frozenset(p[:2])]
        if self.kind == "PATH":
            return [frozenset(p[0]), frozenset(p[1])]
        raise InvalidInput(f"unknown gadget kind {self.kind!r}")

    def to_dict(self) -> dict:
        if self.kind == "NEQ":
            params = [sorted(self.params[0])]
        elif self.kind == "PATH":
            params = [sorted(self.params[0]), sorted(self.params[1]), sorted(map(list, self.params[2]))]
        else:
            params = list(self.params)
        return {"kind": self.kind, "params": params}


def neq_spec(S) -> GadgetSpec:
    return GadgetSpec("NEQ", (frozenset(S),))


def or3_spec(a: int, b: int) -> GadgetSpec:
    return GadgetSpec("OR3", (a, b))


def impl_spec(a1: int, a2: int, b1: int, b2: int) -> GadgetSpec:
    return GadgetSpec("IMPL", (a1, a2, b1, b2))


def dist_spec(gamma: int, delta: int, a: int, b: int) -> GadgetSpec:
    return GadgetSpec("DIST", (gamma, delta, a, b))


def target_relation(spec: GadgetSpec) -> set:
    """Exact relation requested by a GadgetSpec.  For DIST this is the required part
    {(a, gamma), (b, delta)}; (b, gamma) is optional and (a, delta) forbidden."""
    p = spec.params
    if spec.kind == "NEQ":
        s = sorted(p[0])
        if len(s) < 2:
            raise InvalidInput("NEQ needs at least two colours")
        return {(u, v) for u in s for v in s if u != v}
    if spec.kind == "OR3":
        a, b = p
        if a == b:
            raise InvalidInput("OR3 needs two distinct colours")
        return {x for x in product((a, b), repeat=3) if x != (b, b, b)}
    if spec.kind == "IMPL":
        a1, a2, b1, b2 = p
        if a1 == a2 or b1 == b2:
            raise InvalidInput("implication needs two distinct colours per side")
        return {(a1, b1), (a2, b2)}
    if spec.kind == "DIST":
        g, d, a, b = p
        if a == b or g == d:
            raise InvalidInput("distinguisher needs distinct colours")
        return {(a, g), (b, d)}
    if spec.kind == "PATH":
        return set(p[2])
    raise InvalidInput(f"unknown gadget kind {spec.kind!r}")


@dataclass
class Gadget:
    """A gadget.  ``instance``/``interface`` are the vertex form; edge
    gadgets also keep the edge instance and its interface edges."""

    spec: GadgetSpec
    instance: Instance
    interface: tuple
    relation: set
    edge_instance: EdgeInstance | None = None
    interface_edges: tuple | None = None
    notes: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        if self.edge_instance is not None:
            return self.edge_instance.graph.order
        return self.instance.n

    def to_dict(self) -> dict:
        d = {
            "spec": self.spec.to_dict(),
            "instance": self.instance.to_dict(),
            "interface": list(self.interface),
            "relation": sorted(map(list, self.relation)),
            "notes": _jsonable(self.notes),
        }
        if self.edge_instance is not None:
            d["edge_instance"] = self.edge_instance.to_dict()
            d["interface_edges"] = [list(e) for e in self.interface_edges]
        return d


def spec_from_dict(d: dict) -> GadgetSpec:
    try:
        kind, params = d["kind"], d["params"]
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"gadget spec needs kind and params: {exc}") from exc
    if kind == "NEQ":
        return neq_spec(params[0])
    if kind == "PATH":
        return GadgetSpec("PATH", (frozenset(params[0]), frozenset(params[1]), frozenset(map(tuple, params[2]))))
    if kind in ("OR3", "IMPL", "DIST"):
        return GadgetSpec(kind, tuple(params))
    raise InvalidInput(f"unknown gadget kind {kind!r}")


def gadget_from_dict(d: dict) -> Gadget:
    from .instance import edge_instance_from_dict, instance_from_dict

    try:
        spec = spec_from_dict(d["spec"])
        inst = instance_from_dict(d["instance"])
        interface = tuple(d["interface"])
        relation = {tuple(r) for r in d["relation"]}
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed gadget: {exc}") from exc
    einst = iface_edges = None
    if "edge_instance" in d:
        einst = edge_instance_from_dict(d["edge_instance"])
        iface_edges = tuple(tuple(e) for e in d["interface_edges"])
    return Gadget(spec, inst, interface, relation, einst, iface_edges, d.get("notes", {}))


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return x


def _is_path_with_ends(g: Graph, ends) -> bool:
    if g.order < 2 or len(g.edges) != g.order - 1 or not g.is_connected():
        return False
    if any(g.degree(v) > 2 for v in range(g.order)):
        return False
    return sorted(v for v in range(g.order) if g.degree(v) == 1) == sorted(ends)


def verify_gadget(g: Gadget, budget=None) -> Verdict:
    """Recompute the realised relation with the oracle and compare with the requested one."""
    spec = g.spec
    if len(g.interface) != spec.arity:
        return Verdict(False, f"arity mismatch: interface has {len(g.interface)}, {spec.kind} needs {spec.arity}")
    inst, interface = g.instance, tuple(g.interface)
    if g.edge_instance is not None:
        expanded, index = expand_edge_instance(g.edge_instance)
        keys = [tuple(sorted(e)) for e in g.interface_edges]
        if any(k not in index for k in keys):
            return Verdict(False, "interface edge missing", keys)
        for leaf, _ in g.interface_edges:
            if g.edge_instance.graph.degree(leaf) != 1:
                return Verdict(False, "interface edge is not pending", leaf)
        if expanded.graph != inst.graph or expanded.lists != inst.lists:
            return Verdict(False, "vertex form does not match the expanded edge instance")
        if tuple(index[k] for k in keys) != interface:
            return Verdict(False, "interface vertices do not match interface edges")
    for v, lst in zip(interface, spec.interface_lists()):
        if inst.lists[v] != lst:
            return Verdict(False, "interface list differs from the requested one", (v, sorted(inst.lists[v]), sorted(lst)))
    realised = project_relation(inst, interface, budget)
    if realised != set(g.relation):
        diff = sorted(realised ^ set(g.relation))
        return Verdict(False, "stored relation differs from the realised one", diff[0])
    if spec.kind == "DIST":
        gam, dlt, a, b = spec.params
        if not _is_path_with_ends(inst.graph, interface):
            return Verdict(False, "distinguisher is not a path between its interface vertices")
        for need in ((a, gam), (b, dlt)):
            if need not in realised:
                return Verdict(False, "required pair missing", need)
        if (a, dlt) in realised:
            return Verdict(False, "forbidden pair realised", (a, dlt))
        return Verdict(True)
    want = target_relation(spec)
    if realised != want:
        diff = sorted(realised ^ want)
        return Verdict(False, "realised relation differs from the requested one", diff[0])
    return Verdict(True)


def _checked(g: Gadget, budget=None) -> Gadget:
    v = verify_gadget(g, budget)
    if not v:
        raise GadgetNotFound(f"assembled {g.spec.kind} gadget failed verification: {v.message}", v.where)
    return g


# ---------------------------------------------------------------------------
# transfer-relation search over paths


def candidate_lists(h: TargetGraph, max_size: int = 3) -> list:
    """Incomparable colour sets of size <= max_size (class-pure if H is bipartite)."""
    out = []
    pools = [sorted(c) for c in h.classes] if h.is_bipartite else [list(range(h.n))]
    for pool in pools:
        for k in range(1, max_size + 1):
            for s in combinations(pool, k):
                if h.is_incomparable_set(s):
                    out.append(frozenset(s))
    out.sort(key=lambda s: (len(s), sorted(s)))
    return out


class PathIndex:
    """BFS tree of transfer states from a fixed start list.

    A state is a tuple of colour masks, one per start colour (in sorted
    order): the colours of the current vertex reachable from that start
    colour.  States are recorded in BFS order with their depth (number of
    path vertices) and the list sequence that reaches them.
    """

    def __init__(self, h: TargetGraph, start, max_len: int = PATH_CAP, lists=None, state_cap: int = 200_000):
        self.h = h
        self.start = tuple(sorted(start))
        self.max_len = max_len
        self.lists = candidate_lists(h) if lists is None else lists
        self.nb = h.nbhd_mask
        s0 = tuple(1 << a for a in self.start)
        self.states = [s0]
        self.depth = [1]
        self.parent = [-1]
        self.step_list = [frozenset(self.start)]
        self.seen = {s0: 0}
        self.exhausted = False
        q = deque([0])
        while q:
            i = q.popleft()
            if self.depth[i] >= max_len - 1:
                continue
            for lst in self.lists:
                ns = self.step(self.states[i], lst)
                if not any(ns) or ns in self.seen:
                    continue
                if len(self.states) >= state_cap:
                    q.clear()
                    break
                self.seen[ns] = len(self.states)
                self.states.append(ns)
                self.depth.append(self.depth[i] + 1)
                self.parent.append(i)
                self.step_list.append(lst)
                q.append(len(self.states) - 1)
        else:
            self.exhausted = all(d < max_len - 1 for d in self.depth)

    def step(self, state: tuple, lst) -> tuple:
        lm = mask_of(lst)
        out = []
        for m in state:
            sup = 0
            for c in iter_bits(m):
                sup |= self.nb[c]
            out.append(sup & lm)
        return tuple(out)

    def relation(self, state: tuple) -> set:
        return {(o, c) for o, m in zip(self.start, state) for c in iter_bits(m)}

    def lists_to(self, i: int) -> list:
        seq = []
        while i >= 0:
            seq.append(self.step_list[i])
            i = self.parent[i]
        return seq[::-1]

    def find(self, end_list, accept, min_vertices: int = 2):
        """Shortest list sequence ending with ``end_list`` whose relation passes ``accept``."""
        end_list = frozenset(end_list)
        for i, st in enumerate(self.states):
            if self.depth[i] + 1 < min_vertices or self.depth[i] + 1 > self.max_len:
                continue
            rel = self.relation(self.step(st, end_list))
            if accept(rel):
                return self.lists_to(i) + [end_list]
        return None


_INDEX_CACHE: dict = {}


def path_index(h: TargetGraph, start, max_len: int = PATH_CAP) -> PathIndex:
    key = (h.graph, tuple(sorted(start)), max_len)
    idx = _INDEX_CACHE.get(key)
    if idx is None:
        idx = _INDEX_CACHE[key] = PathIndex(h, start, max_len)
    return idx


def path_instance(h: TargetGraph, lists) -> Instance:
    return Instance(h, path_graph(len(lists)), lists)


def synthesize_path_gadget(h, end_lists, relation, max_len: int = PATH_CAP, min_vertices: int = 2):
    """Shortest path whose end-to-end relation equals ``relation``, or None.

    When None is returned, ``synthesize_path_gadget.last_exhausted`` tells
    whether the whole reachable state space was explored."""
    h = as_target(h)
    start, end = frozenset(end_lists[0]), frozenset(end_lists[1])
    want = {tuple(p) for p in relation}
    idx = path_index(h, start, max_len)
    seq = idx.find(end, lambda r: r == want, min_vertices)
    synthesize_path_gadget.last_exhausted = idx.exhausted
    if seq is None:
        return None
    inst = path_instance(h, seq)
    spec = GadgetSpec("PATH", (start, end, frozenset(want)))
    return _checked(Gadget(spec, inst, (0, len(seq) - 1), set(want)))


synthesize_path_gadget.last_exhausted = False


def distinguisher_path(h, gamma: int, delta: int, a: int, b: int, max_len: int = PATH_CAP):
    """Shortest path D^{gamma/delta}_{a/b}, or None."""
    h = as_target(h)
    idx = path_index(h, (a, b), max_len)

    def ok(rel):
        return (a, gamma) in rel and (b, delta) in rel and (a, delta) not in rel

    seq = idx.find((gamma, delta), ok)
    if seq is None:
        return None
    inst = path_instance(h, seq)
    rel = project_relation(inst, (0, len(seq) - 1))
    return _checked(Gadget(dist_spec(gamma, delta, a, b), inst, (0, len(seq) - 1), rel))


# ---------------------------------------------------------------------------
# distinguisher basis


@dataclass
class DistinguisherBasis:
    alpha: int
    beta: int
    alpha_p: int
    beta_p: int
    library: dict  # (gamma, delta, a, b) -> Gadget

    def pair_for(self, h: TargetGraph, colour: int) -> tuple:
        """(p, q, p', q'): the basis pair in the class of ``colour`` and its partner."""
        if h.class_of(colour) == h.class_of(self.alpha):
            return self.alpha, self.beta, self.alpha_p, self.beta_p
        return self.alpha_p, self.beta_p, self.alpha, self.beta

    def path(self, gamma, delta, a, b) -> Gadget:
        try:
            return self.library[(gamma, delta, a, b)]
        except KeyError:
            raise GadgetNotFound(f"no distinguisher D^{gamma}/{delta}_{a}/{b} in the library") from None

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "alpha_p": self.alpha_p,
            "beta_p": self.beta_p,
            "library": {f"{g}/{d}|{a}/{b}": [sorted(l) for l in gd.instance.lists]
                        for (g, d, a, b), gd in sorted(self.library.items())},
        }


def incomparable_pairs(h: TargetGraph, cls=None) -> list:
    verts = range(h.n) if cls is None else sorted(cls)
    return [(a, b) for a, b in combinations(verts, 2) if h.incomparable(a, b)]


def find_distinguisher_basis(h_star, max_len: int = PATH_CAP, log: list | None = None):
    """First basis (alpha, beta, alpha', beta') whose full path library synthesises.

    Returns None when every candidate fails; ``log`` collects the first
    missing (gamma, delta, a, b) of each rejected candidate."""
    h = as_target(h_star)
    if not h.is_bipartite:
        raise PreconditionError("distinguisher basis needs a bipartite target")
    if not h.graph.is_connected():
        raise PreconditionError("distinguisher basis needs a connected target")
    x_cls, y_cls = h.classes
    pairs = {0: incomparable_pairs(h, x_cls), 1: incomparable_pairs(h, y_cls)}
    cache = {}

    def get(gamma, delta, a, b):
        key = (gamma, delta, a, b)
        if key not in cache:
            cache[key] = distinguisher_path(h, gamma, delta, a, b, max_len)
        return cache[key]

    for al, be in pairs[0]:
        for ap, bp in ((p, q) for p, q in product(sorted(y_cls), repeat=2) if p != q):
            if not h.incomparable(ap, bp):
                continue
            if not (h.adjacent(al, ap) and h.adjacent(be, bp)):
                continue
            if h.adjacent(al, bp) or h.adjacent(be, ap):
                continue
            library = {}
            failed = None
            for side, (g0, d0) in ((0, (al, be)), (1, (ap, bp))):
                for p, q in pairs[side]:
                    for a, b in ((p, q), (q, p)):
                        for gamma, delta in ((g0, d0), (d0, g0)):
                            gd = get(gamma, delta, a, b)
                            if gd is None:
                                failed = (gamma, delta, a, b)
                                break
                            library[(gamma, delta, a, b)] = gd
                        if failed:
                            break
                    if failed:
                        break
                if failed:
                    break
            if failed:
                if log is not None:
                    log.append({"candidate": (al, be, ap, bp), "missing": failed})
                continue
            return DistinguisherBasis(al, be, ap, bp, library)
    return None


# ---------------------------------------------------------------------------
# OR3 gadgets


def find_or3_core(h, a: int, b: int, cap: int = OR3_CAP, max_len: int = PATH_CAP) -> Gadget:
    """OR3(a, b) gadget shaped as a subdivided claw, searched up to ``cap`` vertices.

    Each branch is a path from a leaf with list {a, b} into the centre z;
    its effect is summarised by which leaf colours can reach each colour
    of L(z).  Triples of branches are tried by increasing total size."""
    h = as_target(h)
    idx = path_index(h, (a, b), min(max_len, cap))
    want = target_relation(or3_spec(a, b))
    best = None
    for lz in candidate_lists(h):
        # summary -> minimal depth and state index
        summaries = {}
        for i, st in enumerate(idx.states):
            zs = idx.step(st, lz)
            summ = tuple(
                frozenset(o for o, m in zip(idx.start, zs) if (m >> c) & 1) for c in sorted(lz)
            )
            if not any(summ):
                continue
            if summ not in summaries:
                summaries[summ] = i
        cands = sorted(summaries.items(), key=lambda kv: (idx.depth[kv[1]], kv[1]))
        zl = sorted(lz)
        for x in range(len(cands)):
            for y in range(x, len(cands)):
                for w in range(y, len(cands)):
                    trip = (cands[x], cands[y], cands[w])
                    size = 1 + sum(idx.depth[i] for _, i in trip)
                    if size > cap or (best is not None and size >= best[0]):
                        continue
                    rel = set()
                    for ci in range(len(zl)):
                        rel.update(product(*(s[ci] for s, _ in trip)))
                    if rel == want:
                        best = (size, lz, trip)
    if best is None:
        raise GadgetNotFound(f"no OR3({a},{b}) claw gadget within {cap} vertices", exhausted=idx.exhausted)
    size, lz, trip = best
    lists = [frozenset(lz)]
    edges = []
    interface = []
    for _, i in trip:
        seq = idx.lists_to(i)  # from the leaf towards the centre
        base = len(lists)
        lists.extend(seq)
        for j in range(len(seq) - 1):
            edges.append((base + j, base + j + 1))
        edges.append((base + len(seq) - 1, 0))
        interface.append(base)
    inst = Instance(h, Graph(len(lists), edges), lists)
    rel = project_relation(inst, interface)
    g = Gadget(or3_spec(a, b), inst, tuple(interface), rel, notes={"shape": "claw", "centre_list": sorted(lz)})
    return _checked(g)


_CORE_CACHE: dict = {}


def or3_core(h, a, b, cap=OR3_CAP) -> Gadget:
    key = (as_target(h).graph, a, b, cap)
    if key not in _CORE_CACHE:
        _CORE_CACHE[key] = find_or3_core(h, a, b, cap)
    return _CORE_CACHE[key]


def _attach_paths(core: Gadget, paths: list) -> Gadget:
    """Glue path ``paths[s]`` by its y end onto interface vertex s of ``core``;
    the x ends become the new interface."""
    parts = [core.instance] + [p.instance for p in paths]
    union, offs = instance_union(*parts)
    groups = []
    for s, p in enumerate(paths):
        groups.append((offs[0] + core.interface[s], offs[s + 1] + p.interface[1]))
    merged, newid = identify_vertices(union, groups)
    interface = tuple(newid[offs[s + 1] + p.interface[0]] for s, p in enumerate(paths))
    return merged, interface


def assemble_or3(h, basis: DistinguisherBasis, a: int, b: int, cap: int = OR3_CAP) -> Gadget:
    """OR3(a, b) from a core OR3 on the basis pair of the same class and
    three distinguisher paths D^{false/true}_{b/a}."""
    h = as_target(h)
    if not h.incomparable(a, b):
        raise PreconditionError("OR3 colours must be incomparable", (a, b))
    p, q, _, _ = basis.pair_for(h, a)
    if h.class_of(a) != h.class_of(b):
        raise PreconditionError("OR3 colours must lie in one class", (a, b))
    core = or3_core(h, p, q, cap)
    d = basis.path(q, p, b, a)
    inst, interface = _attach_paths(core, [d, d, d])
    rel = project_relation(inst, interface)
    g = Gadget(or3_spec(a, b), inst, interface, rel,
               notes={"core": core.spec.to_dict(), "core_order": core.order, "path_order": d.order})
    return _checked(g)


# ---------------------------------------------------------------------------
# occurrence (implication) gadgets


def assemble_occurrence(h, basis: DistinguisherBasis, pair1, pair2) -> Gadget:
    """(a1/a2 -> b1/b2) gadget shaped as a cycle with non-adjacent interface."""
    h = as_target(h)
    a1, a2 = pair1
    b1, b2 = pair2
    for s in (pair1, pair2):
        if not h.incomparable(*s) or h.class_of(s[0]) != h.class_of(s[1]):
            raise PreconditionError("each pair must be incomparable and inside one class", s)
    p, q, pp, qp = basis.pair_for(h, a1)
    same = h.class_of(a1) == h.class_of(b1)

    def half(x1, x2, y1, y2):
        # excludes (x1, y2): x1 forces p on the joint, which forces y1
        da = basis.path(p, q, x1, x2)
        db = basis.path(q, p, y2, y1) if same else basis.path(qp, pp, y2, y1)
        union, offs = instance_union(da.instance, db.instance)
        ya = offs[0] + da.interface[1]
        yb = offs[1] + db.interface[1]
        xa = offs[0] + da.interface[0]
        xb = offs[1] + db.interface[0]
        if same:
            merged, newid = identify_vertices(union, [(ya, yb)])
            return merged, newid[xa], newid[xb]
        merged = Instance(h, Graph(union.n, list(union.graph.edges) + [(ya, yb)]), union.lists)
        return merged, xa, xb

    f1, s1a, s2a = half(a1, a2, b1, b2)
    f2, s1b, s2b = half(a2, a1, b2, b1)
    union, offs = instance_union(f1, f2)
    merged, newid = identify_vertices(union, [(s1a, offs[1] + s1b), (s2a, offs[1] + s2b)])
    s1, s2 = newid[s1a], newid[s2a]
    g = merged.graph
    if not (g.is_connected() and len(g.edges) == g.order and all(g.degree(v) == 2 for v in range(g.order))):
        raise GadgetNotFound("occurrence gadget is not a cycle")
    if g.has_edge(s1, s2):
        raise GadgetNotFound("occurrence gadget interface vertices are adjacent")
    rel = project_relation(merged, (s1, s2))
    return _checked(Gadget(impl_spec(a1, a2, b1, b2), merged, (s1, s2), rel,
                           notes={"shape": "cycle", "same_class": same}))


# ---------------------------------------------------------------------------
# NEQ gadgets in vertex form


def synthesize_neq(h, S, max_len: int = PATH_CAP) -> Gadget:
    """NEQ(S): a single path if one realises it exactly, otherwise parallel
    paths between s1 and s2, one per colour a of S excluding (a, a)."""
    h = as_target(h)
    S = sorted(S)
    if not h.is_incomparable_set(S):
        raise PreconditionError("NEQ needs an incomparable set", S)
    want = target_relation(neq_spec(S))
    idx = path_index(h, S, max_len)
    seq = idx.find(S, lambda r: r == want)
    if seq is not None:
        inst = path_instance(h, seq)
        return _checked(Gadget(neq_spec(S), inst, (0, len(seq) - 1), set(want), notes={"shape": "path"}))
    seqs = []
    for a in S:
        used_edge = any(len(s) == 2 for s in seqs)
        found = idx.find(S, lambda r, a=a: want <= r and (a, a) not in r, 3 if used_edge else 2)
        if found is None:
            raise GadgetNotFound(f"no path excluding ({a},{a}) for NEQ({S})", exhausted=idx.exhausted)
        seqs.append(found)
    parts = [path_instance(h, s) for s in seqs]
    union, offs = instance_union(*parts)
    firsts = [offs[i] for i in range(len(parts))]
    lasts = [offs[i] + len(seqs[i]) - 1 for i in range(len(parts))]
    merged, newid = identify_vertices(union, [firsts, lasts])
    iface = (newid[firsts[0]], newid[lasts[0]])
    rel = project_relation(merged, iface)
    return _checked(Gadget(neq_spec(S), merged, iface, rel, notes={"shape": "parallel-paths", "paths": len(seqs)}))


# ---------------------------------------------------------------------------
# edge gadgets (for line graphs)


def _edge_gadget(spec: GadgetSpec, einst: EdgeInstance, iface_edges, notes=None) -> Gadget:
    inst, index = expand_edge_instance(einst)
    iface = tuple(index[tuple(sorted(e))] for e in iface_edges)
    rel = project_relation(inst, iface)
    return Gadget(spec, inst, iface, rel, einst, tuple(tuple(e) for e in iface_edges), notes or {})


def _path_edge_instance(h: TargetGraph, edge_lists) -> EdgeInstance:
    k = len(edge_lists)
    g = path_graph(k + 1)
    return EdgeInstance(h, g, {(i, i + 1): edge_lists[i] for i in range(k)})


@dataclass
class HalfEdgePath:
    """Edge instance on a path whose end edges carry {u0, u1}; the pair
    (first edge, last edge) can be (u0, u1) and (u1, u0) but not (u0, u0)."""

    edge_instance: EdgeInstance
    first: tuple
    last: tuple
    relation: set


def half_edge_path(h, u0: int, u1: int, max_len: int = PATH_CAP) -> HalfEdgePath:
    """Path P(u0, u1): found over H* from {u0', u1'} and lifted back to H."""
    h = as_target(h)
    if u0 not in h.nbhd[u0] or u1 not in h.nbhd[u1]:
        raise PreconditionError("u0 and u1 must have loops", (u0, u1))
    if h.adjacent(u0, u1) or not h.incomparable(u0, u1):
        raise PreconditionError("u0, u1 must be incomparable and non-adjacent", (u0, u1))
    mp = associated_bipartite(h)
    hs = mp.star
    n = h.n
    start = (u0, u1)
    idx = path_index(hs, start, max_len)

    def ok(rel):
        o = {(a % n, c % n) for a, c in rel}
        return (u0, u1) in o and (u1, u0) in o and (u0, u0) not in o

    best = None
    for end in ((u0, u1), (u0 + n, u1 + n)):
        seq = idx.find(end, ok, min_vertices=3)
        if seq is not None and (best is None or len(seq) < len(best)):
            best = seq
    if best is None:
        raise GadgetNotFound(f"no half-edge path P({u0},{u1}) within {max_len}", exhausted=idx.exhausted)
    lifted = [frozenset(x % n for x in lst) for lst in best]
    einst = _path_edge_instance(h, lifted)
    k = len(lifted)
    inst, index = expand_edge_instance(einst)
    rel = project_relation(inst, (index[(0, 1)], index[(k - 1, k)]))
    if (u0, u1) not in rel or (u1, u0) not in rel or (u0, u0) in rel:
        raise GadgetNotFound("lifted half-edge path lost its properties", sorted(rel))
    return HalfEdgePath(einst, (0, 1), (k, k - 1), rel)


def assemble_edge_neq(h, u0: int, u1: int, max_len: int = PATH_CAP) -> Gadget:
    """Edge NEQ({u0, u1}) gadget with pending interface edges.

    P(u0, u1) and P(u1, u0) share both end vertices v1, v2; pending edges
    v1'v1 and v2v2' are the interface."""
    h = as_target(h)
    p0 = half_edge_path(h, u0, u1, max_len)
    p1 = half_edge_path(h, u1, u0, max_len)
    k0 = p0.edge_instance.graph.order - 1
    k1 = p1.edge_instance.graph.order - 1
    if k0 < 2 or k1 < 2:
        raise GadgetNotFound("half-edge paths must have more than one edge")
    # vertices: P0 is 0..k0; P1 interior gets fresh ids; v1 = 0, v2 = k0
    lists = {}
    for (a, b), lst in p0.edge_instance.edge_lists.items():
        lists[(a, b)] = lst
    nxt = k0 + 1
    ids = {0: 0, k1: k0}
    for i in range(1, k1):
        ids[i] = nxt
        nxt += 1
    for (a, b), lst in p1.edge_instance.edge_lists.items():
        x, y = ids[a], ids[b]
        key = (min(x, y), max(x, y))
        if key in lists:
            raise GadgetNotFound("parallel edge created while gluing half-edge paths")
        lists[key] = lst
    v1p, v2p = nxt, nxt + 1
    pair = frozenset((u0, u1))
    lists[(0, v1p)] = pair
    lists[(k0, v2p)] = pair
    g = Graph(nxt + 2, list(lists))
    einst = EdgeInstance(h, g, lists)
    gd = _edge_gadget(neq_spec((u0, u1)), einst, ((v1p, 0), (v2p, k0)), {"half_paths": [k0, k1]})
    return _checked(gd)


@dataclass
class WalkCycle:
    """Induced cycle of H* through u0'u0'' meeting u1, with the walk data derived from it."""

    cycle: tuple
    x: tuple  # origins x_0 .. x_{l-1}
    i: int
    v0: int
    v1: int
    walk0: tuple
    walk1: tuple


def find_walk_cycle(h, u0: int, u1: int, min_len: int = 6, cycle_cap: int = 100_000):
    """Search H* for an induced cycle (length >= 6) using the edge u0'u0'' and
    meeting {u1', u1''}; derive v0, v1 and the two walks.  None if absent."""
    h = as_target(h)
    mp = associated_bipartite(h)
    hs, n = mp.star, h.n
    count = 0
    for cyc in iter_induced_cycles(hs.graph, min_len):
        count += 1
        if count > cycle_cap:
            raise GadgetNotFound("walk cycle search cap reached")
        if u1 not in cyc and u1 + n not in cyc:
            continue
        L = len(cyc)
        for k in range(L):
            for step in (1, -1):
                if cyc[k] == u0 and cyc[(k + step) % L] == u0 + n:
                    seq = [cyc[(k + step * j) % L] for j in range(L)]
                    x = tuple(c % n for c in seq)
                    for i in range(3, L - 1):
                        if x[i] != u1:
                            continue
                        walk0 = tuple(x[j] for j in range(i, 1, -1))
                        walk1 = tuple(x[j] for j in range(i, L))
                        wc = WalkCycle(tuple(seq), x, i, x[2], x[L - 1], walk0, walk1)
                        if _walks_ok(h, u0, u1, wc):
                            return wc
    return None


def _trim_walk(walk, v):
    for j, w in enumerate(walk):
        if w == v:
            return walk[: j + 1]
    return walk


def _walks_ok(h: TargetGraph, u0, u1, wc: WalkCycle) -> bool:
    if h.adjacent(wc.v0, wc.v1):
        return False
    for walk, v in ((wc.walk0, wc.v0), (wc.walk1, wc.v1)):
        if walk[0] != u1 or walk[-1] != v or v not in h.nbhd[u0]:
            return False
        if any(not h.adjacent(p, q) for p, q in zip(walk, walk[1:])):
            return False
        if any(w in h.nbhd[u0] for w in walk[:-1]):
            return False
    return True


def assemble_edge_or3(h, u0: int, u1: int, max_len: int = PATH_CAP, wc: WalkCycle | None = None) -> Gadget:
    """OR3 edge gadget shaped as a subdivided claw, built from the two
    walks and a half-edge path.  The realised relation is checked; the
    colour playing "false" is read off the realised relation."""
    h = as_target(h)
    if wc is None:
        wc = find_walk_cycle(h, u0, u1)
    if wc is None:
        raise PreconditionError("no suitable induced cycle in the associated bipartite graph", (u0, u1))
    attempts = []
    for p2_dir in ((u1, u0), (u0, u1)):
        hp = half_edge_path(h, *p2_dir, max_len)
        lists = {}
        centre = 0
        nxt = 1
        leaves = []
        for walk in (wc.walk0, wc.walk1):
            # path p_1 .. p_{l+1}; edge j has list {u0, a_j, u1}; p_{l+1} is the centre
            l = len(walk)
            verts = [nxt + j for j in range(l)] + [centre]
            nxt += l
            for j in range(l):
                a, b = verts[j], verts[j + 1]
                lists[(min(a, b), max(a, b))] = frozenset((u0, walk[j], u1))
            leaves.append((verts[0], verts[1]))
        # half-edge path: its last vertex becomes the centre
        k = hp.edge_instance.graph.order - 1
        ids = {k: centre}
        for i in range(k):
            ids[i] = nxt
            nxt += 1
        for (a, b), lst in hp.edge_instance.edge_lists.items():
            x, y = ids[a], ids[b]
            lists[(min(x, y), max(x, y))] = lst
        leaves.append((ids[0], ids[1]))
        einst = EdgeInstance(h, Graph(nxt, list(lists)), lists)
        gd = _edge_gadget(or3_spec(u0, u1), einst, leaves)
        for a, b in ((u0, u1), (u1, u0)):
            if gd.relation == target_relation(or3_spec(a, b)):
                gd.spec = or3_spec(a, b)
                gd.notes = {"half_path": list(p2_dir), "walks": [list(wc.walk0), list(wc.walk1)], "true": a, "false": b}
                return _checked(gd)
        attempts.append({"half_path": p2_dir, "relation": sorted(gd.relation)})
    raise GadgetNotFound("walk-based claw does not realise OR3", attempts)
