"""Hardness reductions compiled into concrete instances.

Each compiler returns a ``ReductionArtifact`` with the instance, a label
for every vertex saying where it came from, the gadget inventory and the
result of a bounded check that the output lies in the intended graph class.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product

from .errors import InvalidInput, PreconditionError, SearchCapExceeded
from .gadgets import (
    Gadget,
    assemble_edge_neq,
    assemble_edge_or3,
    assemble_occurrence,
    assemble_or3,
    find_distinguisher_basis,
    find_walk_cycle,
    synthesize_neq,
)
from .graph import Graph, claw_pattern, complete_graph, contains_induced, longest_induced_path_at_least
from .instance import (
    EdgeInstance,
    Instance,
    Verdict,
    expand_edge_instance,
    full_lists,
    lift_star_instance,
)
from .oracle import solve_brute
from .preprocess import reduce_basic
from .target import StarMapping, TargetGraph, as_target, find_incomparable_c4, strong_split_partition

# ---------------------------------------------------------------------------
# formulas


@dataclass(frozen=True)
class CNFFormula:
    """Variables 1..nvars; each clause is a triple of non-zero signed ints."""

    nvars: int
    clauses: tuple

    def satisfiable(self) -> bool:
        return self.satisfying_assignment() is not None

    def satisfying_assignment(self):
        for bits in product((False, True), repeat=self.nvars):
            if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses):
                return bits
        return None

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def pad_clause(lits) -> tuple:
    lits = list(lits)
    if not 1 <= len(lits) <= 3:
        raise InvalidInput(f"clause must have 1..3 literals, got {lits}")
    while len(lits) < 3:
        lits.append(lits[-1])
    return tuple(lits)


def make_formula(nvars: int, clauses) -> CNFFormula:
    out = []
    for c in clauses:
        for l in c:
            if l == 0 or abs(l) > nvars:
                raise InvalidInput(f"literal {l} out of range")
        out.append(pad_clause(c))
    return CNFFormula(nvars, tuple(out))


def parse_dimacs_cnf(text: str) -> CNFFormula:
    header = None
    clauses, cur = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise InvalidInput(f"bad header line {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise InvalidInput(f"bad header line {line!r}") from None
            continue
        if header is None:
            raise InvalidInput("clause before header")
        for tok in line.split():
            try:
                v = int(tok)
            except ValueError:
                raise InvalidInput(f"bad literal {tok!r}") from None
            if v == 0:
                if not cur:
                    raise InvalidInput("empty clause")
                clauses.append(cur)
                cur = []
            else:
                cur.append(v)
    if header is None:
        raise InvalidInput("missing header")
    if cur:
        raise InvalidInput("last clause not terminated by 0")
    nvars, ncl = header
    if len(clauses) != ncl:
        raise InvalidInput(f"header announces {ncl} clauses, found {len(clauses)}")
    return make_formula(nvars, clauses)


def random_3cnf(rng, nvars: int, nclauses: int) -> CNFFormula:
    clauses = []
    for _ in range(nclauses):
        k = rng.randint(1, 3)
        clauses.append([rng.randint(1, nvars) * rng.choice((1, -1)) for _ in range(k)])
    return make_formula(nvars, clauses)


def is_three_colourable(g: Graph) -> bool:
    return solve_brute(full_lists(TargetGraph(complete_graph(3)), g), budget=None).answer


# ---------------------------------------------------------------------------
# artifacts


@dataclass
class ReductionArtifact:
    kind: str
    instance: Instance
    provenance: list
    freeness: dict
    gadgets: dict = field(default_factory=dict)
    edge_instance: EdgeInstance | None = None
    edge_provenance: dict | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "instance": self.instance.to_dict(),
            "provenance": self.provenance,
            "freeness": self.freeness,
            "gadgets": self.gadgets,
            "notes": self.notes,
        }
        if self.edge_instance is not None:
            d["edge_instance"] = self.edge_instance.to_dict()
            d["edge_provenance"] = {f"{u}-{v}": lab for (u, v), lab in sorted(self.edge_provenance.items())}
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Builder:
    """Accumulates vertices, lists, edges and provenance labels."""

    def __init__(self, h: TargetGraph):
        self.h = h
        self.lists = []
        self.labels = []
        self.edges = set()

    def add(self, lst, label) -> int:
        self.lists.append(frozenset(lst))
        self.labels.append(label)
        return len(self.lists) - 1

    def edge(self, u: int, v: int):
        if u == v:
            raise PreconditionError("loop in instance graph")
        self.edges.add((min(u, v), max(u, v)))

    def copy_gadget(self, g: Gadget, attach: dict, label: str) -> dict:
        """Fresh copy of the gadget; interface positions in ``attach`` map to existing vertices."""
        idmap = {}
        for pos, v in enumerate(g.interface):
            if pos in attach:
                host = attach[pos]
                if self.lists[host] != g.instance.lists[v]:
                    raise PreconditionError("interface list mismatch while gluing", (label, pos))
                idmap[v] = host
        for v in range(g.instance.n):
            if v not in idmap:
                idmap[v] = self.add(g.instance.lists[v], f"{label}:{v}")
        for u, v in g.instance.graph.edges:
            self.edge(idmap[u], idmap[v])
        return idmap

    def instance(self) -> Instance:
        return Instance(self.h, Graph(len(self.lists), sorted(self.edges)), self.lists)


def _check_ptfree(g: Graph, t: int, node_cap: int | None) -> dict:
    try:
        p = longest_induced_path_at_least(g, t, node_cap)
    except SearchCapExceeded:
        return {"family": "P", "t": t, "status": "cap-limited"}
    if p is not None:
        return {"family": "P", "t": t, "status": "violated", "witness": list(p)}
    return {"family": "P", "t": t, "status": "verified"}


def _check_sttt_free(g: Graph, t: int, node_cap: int | None) -> dict:
    try:
        emb = contains_induced(g, claw_pattern(t, t, t), node_cap)
    except SearchCapExceeded:
        return {"family": "S", "t": t, "status": "cap-limited"}
    if emb is not None:
        return {"family": "S", "t": t, "status": "violated", "witness": list(emb)}
    return {"family": "S", "t": t, "status": "verified"}


# ---------------------------------------------------------------------------
# strong split targets


@dataclass
class SplitResult:
    status: str  # "ok" or "no"
    instance: Instance | None
    clique_side: tuple
    independent_side: tuple
    kept: list
    fixed: dict
    reason: str = ""


def is_split_graph(g: Graph, clique, indep) -> bool:
    c, s = list(clique), list(indep)
    if sorted(c + s) != list(range(g.order)):
        return False
    return all(g.has_edge(u, v) for i, u in enumerate(c) for v in c[i + 1:]) and not any(
        g.has_edge(u, v) for i, u in enumerate(s) for v in s[i + 1:]
    )


def to_split_instance(inst: Instance) -> SplitResult:
    """Turn an instance over a strong split target into one on a split graph.

    Lists are first reduced (dominated colours removed), after which no
    list meets both the looped clique P and the loopless part B.  Vertices
    with lists in P become a clique; the others must be independent."""
    part = strong_split_partition(inst.target)
    if part is None:
        raise PreconditionError("target is not a strong split graph")
    p_side, _ = part
    pset = set(p_side)
    red = reduce_basic(inst)
    if red.is_no:
        return SplitResult("no", None, (), (), [], red.fixed, "empty list after reduction")
    ri = red.instance
    xs, ys = [], []
    for v in range(ri.n):
        meets_p = bool(ri.lists[v] & pset)
        meets_b = bool(ri.lists[v] - pset)
        if meets_p and meets_b:
            raise PreconditionError("a reduced list meets both sides of the target", v)
        (xs if meets_p else ys).append(v)
    yset = set(ys)
    for u, v in ri.graph.edges:
        if u in yset and v in yset:
            return SplitResult("no", None, tuple(xs), tuple(ys), red.kept, red.fixed, "edge inside Y")
    edges = set(ri.graph.edges)
    for i, u in enumerate(xs):
        for v in xs[i + 1:]:
            edges.add((u, v))
    out = Instance(ri.target, Graph(ri.n, sorted(edges)), ri.lists)
    if not is_split_graph(out.graph, xs, ys):
        raise PreconditionError("output is not a split graph")
    return SplitResult("ok", out, tuple(xs), tuple(ys), red.kept, red.fixed)


# ---------------------------------------------------------------------------
# 3-SAT -> P_t-free instances over bipartite targets


@dataclass
class SatGadgets:
    predator: tuple
    basis: object
    positive: Gadget
    negative: Gadget
    or3: Gadget

    @property
    def t_prime(self) -> int:
        return max(self.positive.order, self.negative.order, self.or3.order)

    def inventory(self) -> dict:
        return {
            "positive_occurrence": self.positive.order,
            "negative_occurrence": self.negative.order,
            "or3": self.or3.order,
            "basis": [self.basis.alpha, self.basis.beta, self.basis.alpha_p, self.basis.beta_p],
            "predator": list(self.predator),
        }


_SAT_GADGETS: dict = {}


def sat_gadgets(h: TargetGraph, predator=None) -> SatGadgets:
    h = as_target(h)
    key = (h.graph, predator)
    if key in _SAT_GADGETS:
        return _SAT_GADGETS[key]
    if not h.is_bipartite:
        raise PreconditionError("target must be bipartite")
    if predator is None:
        c4 = find_incomparable_c4(h)
        if not c4:
            raise PreconditionError("target has no incomparable C4")
        predator = c4[0]
    a1, a2, b1, b2 = predator
    if not (h.class_of(a1) == h.class_of(a2) != h.class_of(b1) == h.class_of(b2)):
        raise PreconditionError("predator pairs must lie in opposite classes", predator)
    if not (h.incomparable(a1, a2) and h.incomparable(b1, b2) and h.complete_to((a1, a2), (b1, b2))):
        raise PreconditionError("not an incomparable C4", predator)
    basis = find_distinguisher_basis(h)
    if basis is None:
        raise PreconditionError("no distinguisher basis within the search caps")
    sg = SatGadgets(
        tuple(predator),
        basis,
        assemble_occurrence(h, basis, (a1, a2), (b1, b2)),
        assemble_occurrence(h, basis, (a1, a2), (b2, b1)),
        assemble_or3(h, basis, b1, b2),
    )
    _SAT_GADGETS[key] = sg
    return sg


def sat_to_ptfree(phi: CNFFormula, h, predator=None, check_free: bool = True, node_cap: int | None = 5_000_000) -> ReductionArtifact:
    """Biclique V x U with occurrence gadgets and one OR3 gadget per clause.

    v_j -> a1 means x_j true; u -> b1 means the literal is true."""
    h = as_target(h)
    sg = sat_gadgets(h, tuple(predator) if predator is not None else None)
    a1, a2, b1, b2 = sg.predator
    bld = _Builder(h)
    vs = [bld.add((a1, a2), f"var:{j + 1}") for j in range(phi.nvars)]
    us = []
    for ci, clause in enumerate(phi.clauses):
        for k, lit in enumerate(clause):
            us.append(bld.add((b1, b2), f"lit:{ci}:{k}:{lit}"))
    for v in vs:
        for u in us:
            bld.edge(v, u)
    pos = 0
    for ci, clause in enumerate(phi.clauses):
        for k, lit in enumerate(clause):
            gad = sg.positive if lit > 0 else sg.negative
            bld.copy_gadget(gad, {0: vs[abs(lit) - 1], 1: us[pos]}, f"occ:{ci}:{k}")
            pos += 1
        base = 3 * ci
        bld.copy_gadget(sg.or3, {0: us[base], 1: us[base + 1], 2: us[base + 2]}, f"or3:{ci}")
    inst = bld.instance()
    n_expected = phi.nvars + 3 * len(phi.clauses) * (sg.positive.order - 1) + len(phi.clauses) * (sg.or3.order - 3)
    if sg.positive.order != sg.negative.order:
        n_expected = None
    t_prime = sg.t_prime
    t = 4 * t_prime + 4
    free = _check_ptfree(inst.graph, t, node_cap) if check_free else {"family": "P", "t": t, "status": "skipped"}
    return ReductionArtifact(
        "sat-pt",
        inst,
        bld.labels,
        free,
        {**sg.inventory(), "t_prime": t_prime},
        notes={"t": t, "expected_order": n_expected, "true_colour": a1, "literal_true": b1},
    )


def lift_reduction_to_nonbipartite(art: ReductionArtifact, mapping: StarMapping) -> ReductionArtifact:
    """Lift an artifact over H* to H: L(v) = {a : a' or a'' in L'(v)}."""
    lifted = lift_star_instance(art.instance, mapping)
    return ReductionArtifact(
        art.kind + "+lift",
        lifted,
        list(art.provenance),
        dict(art.freeness),
        dict(art.gadgets),
        notes={**art.notes, "lifted_from_star": True},
    )


# ---------------------------------------------------------------------------
# 3-colouring -> S_{t,t,t}-free instances


def _private(h: TargetGraph, S, l):
    others = [u for u in S if u != S[l]]
    return sorted(w for w in h.nbhd[S[l]] if not any(w in h.nbhd[o] for o in others))


def _shared(h: TargetGraph, p, q, r):
    return sorted((h.nbhd[p] & h.nbhd[q]) - h.nbhd[r])


def rigidity_lists(h, S) -> tuple:
    """Lists of the pendant set Q that forces a clique with lists S to one colour.

    Returns ``(case, lists)`` following the private-neighbour case split."""
    h = as_target(h)
    S = tuple(S)
    if len(S) != 3 or not h.is_incomparable_set(S):
        raise PreconditionError("S must be three pairwise incomparable colours", S)
    for u in S:
        if u not in h.nbhd[u]:
            raise PreconditionError("every colour of S needs a loop", u)
    priv = [_private(h, S, l) for l in range(3)]
    have = [l for l in range(3) if priv[l]]
    if len(have) == 3:
        return 1, [frozenset(p[0] for p in priv)]
    if len(have) == 2:
        k = next(l for l in range(3) if not priv[l])
        p, q = have
        wp, wq = priv[p][0], priv[q][0]
        wkp = _shared(h, S[k], S[p], S[q])
        wkq = _shared(h, S[k], S[q], S[p])
        if not wkp or not wkq:
            raise PreconditionError("incomparability witnesses missing (case 2)", S)
        return 2, [frozenset((wkp[0], wp, wq)), frozenset((wkq[0], wp, wq))]
    w12 = _shared(h, S[0], S[1], S[2])
    w13 = _shared(h, S[0], S[2], S[1])
    w23 = _shared(h, S[1], S[2], S[0])
    if not (w12 and w13 and w23):
        raise PreconditionError("incomparability witnesses missing (case 3)", S)
    a, b, c = w12[0], w13[0], w23[0]
    return 3, [frozenset((a, b)), frozenset((a, c)), frozenset((b, c))]


def col3_to_sabc(g: Graph, h, S, check_free: bool = True, node_cap: int | None = 2_000_000, neq: Gadget | None = None) -> ReductionArtifact:
    """Cliques K^i of copies x_ij with lists S, NEQ(S) gadgets on edges,
    and pendant sets Q^i forcing each clique to one colour."""
    h = as_target(h)
    S = tuple(S)
    case, qlists = rigidity_lists(h, S)
    neq = neq or synthesize_neq(h, S)
    bld = _Builder(h)
    x = {}
    for i in range(g.order):
        for j in sorted(g.neighbors(i)):
            x[(i, j)] = bld.add(S, f"K:{i}:{j}")
    for i in range(g.order):
        members = [x[(i, j)] for j in sorted(g.neighbors(i))]
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                bld.edge(members[a], members[b])
        if members:
            for k, lst in enumerate(qlists):
                q = bld.add(lst, f"Q:{i}:{k}")
                for m in members:
                    bld.edge(q, m)
    for i, j in g.edges:
        bld.copy_gadget(neq, {0: x[(i, j)], 1: x[(j, i)]}, f"neq:{i}-{j}")
    inst = bld.instance()
    t = neq.order
    free = _check_sttt_free(inst.graph, t, node_cap) if check_free else {"family": "S", "t": t, "status": "skipped"}
    return ReductionArtifact(
        "col3-sabc",
        inst,
        bld.labels,
        free,
        {"neq": neq.order, "case": case, "q_lists": [sorted(l) for l in qlists]},
        notes={"S": list(S)},
    )


# ---------------------------------------------------------------------------
# 3-SAT -> line graphs (edge instances)


class _EdgeBuilder:
    def __init__(self, h: TargetGraph):
        self.h = h
        self.nv = 0
        self.lists = {}
        self.labels = {}

    def vertex(self) -> int:
        self.nv += 1
        return self.nv - 1

    def edge(self, u, v, lst, label):
        key = (min(u, v), max(u, v))
        if u == v or key in self.lists:
            raise PreconditionError("gluing would create a loop or a parallel edge", key)
        self.lists[key] = frozenset(lst)
        self.labels[key] = label

    def drop_edge(self, u, v):
        key = (min(u, v), max(u, v))
        del self.lists[key]
        del self.labels[key]

    def copy(self, g: Gadget, rename: dict, label: str) -> dict:
        ei = g.edge_instance
        idmap = dict(rename)
        for v in range(ei.graph.order):
            if v not in idmap:
                idmap[v] = self.vertex()
        for (u, v), lst in ei.edge_lists.items():
            self.edge(idmap[u], idmap[v], lst, f"{label}:{u}-{v}")
        return idmap

    def glue_pending(self, lit_edge, g: Gadget, pos: int, rename: dict):
        """Plan identification of the literal edge (leaf, inner) with interface edge ``pos`` of ``g``:
        the literal leaf disappears and the gadget leaf is renamed to the literal's inner end."""
        leaf, inner = lit_edge
        gleaf, _ = g.interface_edges[pos]
        if self.lists[(min(leaf, inner), max(leaf, inner))] != g.edge_instance.edge_lists[tuple(sorted(g.interface_edges[pos]))]:
            raise PreconditionError("pending edge lists differ")
        self.drop_edge(leaf, inner)
        rename[gleaf] = inner

    def instance(self) -> EdgeInstance:
        used = sorted({v for e in self.lists for v in e})
        pos = {v: i for i, v in enumerate(used)}
        lists = {(pos[u], pos[v]): lst for (u, v), lst in self.lists.items()}
        labels = {(pos[u], pos[v]): lab for (u, v), lab in self.labels.items()}
        self.final_labels = labels
        return EdgeInstance(self.h, Graph(len(used), list(lists)), lists)


def sat_to_linegraph(phi: CNFFormula, h, u0: int, u1: int, check: bool = True) -> ReductionArtifact:
    """Edge instance whose line graph encodes ``phi``.

    Each variable is a star whose edges carry {u0, u1}; negative
    occurrences pass through an edge NEQ gadget; each clause is an OR3
    edge gadget glued to its three literal edges."""
    h = as_target(h)
    wc = find_walk_cycle(h, u0, u1)
    if wc is None:
        raise PreconditionError(
            "no induced cycle of length >= 6 in the associated bipartite graph through u0'u0'' meeting u1",
            {"u0": u0, "u1": u1},
        )
    neq = assemble_edge_neq(h, u0, u1)
    orf = assemble_edge_or3(h, u0, u1, wc=wc)
    true_c = orf.notes["true"]
    eb = _EdgeBuilder(h)
    occ = {}
    for ci, clause in enumerate(phi.clauses):
        for k, lit in enumerate(clause):
            occ.setdefault(abs(lit), []).append((ci, k, lit))
    literal_edge = {}
    pair = (u0, u1)
    for var in range(1, phi.nvars + 1):
        if var not in occ:
            continue
        z = eb.vertex()
        for ci, k, lit in occ[var]:
            leaf = eb.vertex()
            eb.edge(z, leaf, pair, f"star:{var}:{ci}:{k}")
            if lit > 0:
                literal_edge[(ci, k)] = (leaf, z)
            else:
                rename = {}
                eb.glue_pending((leaf, z), neq, 0, rename)
                idmap = eb.copy(neq, rename, f"neq:{ci}:{k}")
                s2leaf, s2inner = neq.interface_edges[1]
                literal_edge[(ci, k)] = (idmap[s2leaf], idmap[s2inner])
    for ci, clause in enumerate(phi.clauses):
        rename = {}
        for k in range(3):
            eb.glue_pending(literal_edge[(ci, k)], orf, k, rename)
        eb.copy(orf, rename, f"or3:{ci}")
    einst = eb.instance()
    inst, index = expand_edge_instance(einst)
    prov = [None] * inst.n
    for e, i in index.items():
        prov[i] = eb.final_labels[e]
    notes = {
        "true_colour": true_c,
        "walk_cycle": list(wc.cycle),
        "walks": [list(wc.walk0), list(wc.walk1)],
        "v0v1_nonadjacent": not h.adjacent(wc.v0, wc.v1),
        "draft_checks": "verified" if check else "skipped",
    }
    return ReductionArtifact(
        "sat-line",
        inst,
        prov,
        {"family": "line-graph", "t": None, "status": "verified"},
        {"edge_neq": neq.order, "edge_or3": orf.order},
        edge_instance=einst,
        edge_provenance=dict(eb.final_labels),
        notes=notes,
    )


# ---------------------------------------------------------------------------
# verification


def recheck_freeness(art: ReductionArtifact, node_cap: int | None = 5_000_000) -> dict:
    fam, t = art.freeness.get("family"), art.freeness.get("t")
    if fam == "P":
        return _check_ptfree(art.instance.graph, t, node_cap)
    if fam == "S":
        return _check_sttt_free(art.instance.graph, t, node_cap)
    return dict(art.freeness)


def verify_reduction(art: ReductionArtifact, source_answer: bool, budget=None, recheck: bool = False) -> Verdict:
    """Oracle answer of the artifact must equal the source answer; the
    freeness record must not report a violation."""
    res = solve_brute(art.instance, budget=budget)
    if res.answer != bool(source_answer):
        return Verdict(False, f"oracle says {res.answer}, source says {bool(source_answer)}", art.kind)
    free = recheck_freeness(art) if recheck else art.freeness
    if free.get("status") == "violated":
        return Verdict(False, "output is not in the intended class", free.get("witness"))
    return Verdict(True, f"freeness {free.get('status')}")
