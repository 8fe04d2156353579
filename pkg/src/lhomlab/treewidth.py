"""Tree decompositions and the list-homomorphism DP over them."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import BudgetExceeded, InvalidInput, InvariantViolation, LabError
from .graph import Graph, component_masks, iter_bits, mask_of
from .instance import Instance, Verdict, check_homomorphism
from .oracle import SolveResult, default_budget


@dataclass(frozen=True)
class TreeDecomposition:
    bags: tuple
    tree_edges: tuple

    def __init__(self, bags, tree_edges):
        object.__setattr__(self, "bags", tuple(tuple(sorted(set(b))) for b in bags))
        object.__setattr__(self, "tree_edges", tuple(tuple(sorted(e)) for e in tree_edges))

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1

    def adjacency(self) -> list:
        adj = [[] for _ in self.bags]
        for i, j in self.tree_edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj

    def to_dict(self) -> dict:
        return {"bags": [list(b) for b in self.bags], "tree_edges": [list(e) for e in self.tree_edges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def decomposition_from_dict(d: dict) -> TreeDecomposition:
    try:
        return TreeDecomposition(d["bags"], d.get("tree_edges", []))
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed decomposition: {exc}") from exc


def decomposition_from_json(text: str) -> TreeDecomposition:
    return decomposition_from_dict(json.loads(text))


def validate_decomposition(g: Graph, td: TreeDecomposition) -> Verdict:
    """Check the tree shape and the three decomposition axioms; report the first violation."""
    m = len(td.bags)
    if m == 0:
        return Verdict(g.order == 0, "no bags" if g.order else "ok")
    for i, j in td.tree_edges:
        if not (0 <= i < m and 0 <= j < m) or i == j:
            return Verdict(False, "bad tree edge", (i, j))
    if len(td.tree_edges) != m - 1:
        return Verdict(False, "tree must have exactly bags-1 edges", len(td.tree_edges))
    adj = td.adjacency()
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    if len(seen) != m:
        return Verdict(False, "tree is not connected")
    for b in td.bags:
        for v in b:
            if not 0 <= v < g.order:
                return Verdict(False, "bag vertex out of range", v)
    covered = set().union(*map(set, td.bags))
    for v in range(g.order):
        if v not in covered:
            return Verdict(False, "vertex not covered", v)
    bag_sets = [set(b) for b in td.bags]
    for u, v in g.edges:
        if not any(u in b and v in b for b in bag_sets):
            return Verdict(False, "edge not covered", (u, v))
    for v in range(g.order):
        nodes = {i for i, b in enumerate(bag_sets) if v in b}
        start = next(iter(nodes))
        reach = {start}
        stack = [start]
        while stack:
            for j in adj[stack.pop()]:
                if j in nodes and j not in reach:
                    reach.add(j)
                    stack.append(j)
        if reach != nodes:
            return Verdict(False, "bags containing the vertex are not connected", v)
    return Verdict(True)


# ---------------------------------------------------------------------------
# construction


def min_fill_decomposition(g: Graph) -> TreeDecomposition:
    """Greedy min-fill elimination ordering (ties: smaller degree, then smaller id)."""
    n = g.order
    if n == 0:
        return TreeDecomposition([], [])
    adj = {v: set(g.neighbors(v)) for v in range(n)}
    order, bags = [], []
    alive = set(range(n))
    while alive:
        best = None
        for v in sorted(alive):
            nb = list(adj[v])
            fill = 0
            for i in range(len(nb)):
                for j in range(i + 1, len(nb)):
                    if nb[j] not in adj[nb[i]]:
                        fill += 1
            key = (fill, len(nb), v)
            if best is None or key < best:
                best = key
        v = best[2]
        nb = adj[v]
        for a in nb:
            adj[a] |= nb - {a}
            adj[a].discard(v)
        order.append(v)
        bags.append({v} | nb)
        alive.discard(v)
        del adj[v]
    pos = {v: i for i, v in enumerate(order)}
    edges = []
    roots = []
    for i, v in enumerate(order):
        rest = bags[i] - {v}
        if rest:
            edges.append((i, min(pos[u] for u in rest)))
        else:
            roots.append(i)
    for a, b in zip(roots, roots[1:]):
        edges.append((a, b))
    return TreeDecomposition(bags, edges)


def separator_decomposition(g: Graph, t: int, small: int | None = None, **caps) -> TreeDecomposition:
    """Recursive split on N[X] from ``bt_free_separator`` (Gyarfas path as fallback).

    Parts with at most ``small`` vertices (default 2) become leaf bags.

    Each call handles a vertex set S whose outside neighbours lie in the
    boundary B.  Its bag is B plus the separator; each component C of
    S minus the separator recurses with boundary N(C) within that bag.
    """
    from .separators import bt_free_separator, gyarfas_path

    small = small if small is not None else 2
    masks = g.masks
    bags, edges = [], []
    log = {"separator_calls": 0, "fallbacks": 0}

    def separator_of(s_mask: int) -> int:
        verts = list(iter_bits(s_mask))
        sub, keep = g.induced(verts)
        log["separator_calls"] += 1
        try:
            cert = bt_free_separator(sub, t, **caps)
            core = cert.core
        except LabError:
            log["fallbacks"] += 1
            core = tuple(gyarfas_path(sub, 0)[0])
        sep = 0
        for x in core:
            sep |= 1 << keep[x]
            sep |= masks[keep[x]] & s_mask
        return sep

    def rec(s_mask: int, boundary: int, parent: int | None):
        if bin(s_mask).count("1") <= small:
            node = len(bags)
            bags.append(list(iter_bits(s_mask | boundary)))
            if parent is not None:
                edges.append((parent, node))
            return
        sep = separator_of(s_mask)
        node = len(bags)
        bag = boundary | sep
        bags.append(list(iter_bits(bag)))
        if parent is not None:
            edges.append((parent, node))
        for comp in component_masks(masks, s_mask & ~sep):
            nb = 0
            for v in iter_bits(comp):
                nb |= masks[v]
            rec(comp, nb & bag, node)

    full = (1 << g.order) - 1
    prev_root = None
    for comp in component_masks(masks, full):
        root = len(bags)
        rec(comp, 0, None)
        if prev_root is not None:
            edges.append((prev_root, root))
        prev_root = root
    td = TreeDecomposition(bags, edges)
    return td


def build_decomposition(g: Graph, strategy: str = "min-fill", t: int | None = None, **caps) -> TreeDecomposition:
    if strategy == "min-fill":
        td = min_fill_decomposition(g)
    elif strategy in ("separator", "separator-recursive"):
        if t is None:
            raise InvalidInput("separator strategy needs t")
        td = separator_decomposition(g, t, **caps)
    else:
        raise InvalidInput(f"unknown strategy {strategy!r}")
    verdict = validate_decomposition(g, td)
    if not verdict:
        raise InvariantViolation("built an invalid decomposition", {"verdict": verdict.message, "where": verdict.where})
    return td


def exact_treewidth(g: Graph) -> int:
    """Exact treewidth by DP over vertex subsets (small graphs only)."""
    n = g.order
    if n > 16:
        raise InvalidInput("exact_treewidth is for n <= 16")
    if n == 0:
        return -1
    masks = g.masks
    full = (1 << n) - 1

    def q_size(s: int, v: int) -> int:
        # vertices outside s + v reachable from v through s
        seen = 1 << v
        frontier = 1 << v
        out = 0
        while frontier:
            x = (frontier & -frontier).bit_length() - 1
            frontier &= frontier - 1
            nb = masks[x] & ~seen
            seen |= nb
            out |= nb & ~s
            frontier |= nb & s
        return bin(out & ~(1 << v)).count("1")

    tw = {0: -1}
    for s in sorted(range(1, full + 1), key=lambda m: bin(m).count("1")):
        best = n
        for v in iter_bits(s):
            prev = s & ~(1 << v)
            best = min(best, max(tw[prev], q_size(prev, v)))
        tw[s] = best
    return tw[full]


# ---------------------------------------------------------------------------
# dynamic program


def _bag_colourings(inst: Instance, bag, budget):
    nb = inst.target.nbhd_mask
    adj = inst.graph.masks
    lists = [sorted(inst.lists[v]) for v in bag]
    size = 1
    for l in lists:
        size *= len(l)
        if budget is not None and size > budget:
            raise BudgetExceeded(f"bag colourings exceed budget {budget:g}", size, budget)
    out = []
    cur = []

    def rec(i):
        if i == len(bag):
            out.append(tuple(cur))
            return
        v = bag[i]
        for a in lists[i]:
            ok = True
            for j in range(i):
                if (adj[v] >> bag[j]) & 1 and not (nb[a] >> cur[j]) & 1:
                    ok = False
                    break
            if ok:
                cur.append(a)
                rec(i + 1)
                cur.pop()

    rec(0)
    return out


def solve_dp(inst: Instance, td: TreeDecomposition, budget="default") -> SolveResult:
    """Bottom-up DP; tables hold bag colourings that extend over the subtree."""
    if budget == "default":
        budget = default_budget()
    g = inst.graph
    verdict = validate_decomposition(g, td)
    if not verdict:
        raise InvalidInput(f"invalid decomposition: {verdict.message} {verdict.where}")
    if inst.n == 0:
        return SolveResult(True, (), {"width": td.width})
    if any(not l for l in inst.lists):
        return SolveResult(False, None, {"width": td.width})
    adj = td.adjacency()
    order, parent = [], {0: None}
    stack = [0]
    while stack:
        i = stack.pop()
        order.append(i)
        for j in adj[i]:
            if j not in parent:
                parent[j] = i
                stack.append(j)
    children = {i: [] for i in order}
    for i in order:
        if parent[i] is not None:
            children[parent[i]].append(i)
    bags = td.bags
    tables = {}
    # choice[j] maps the projection onto the parent-shared vertices to one child colouring
    choice = {}
    table_total = 0
    for i in reversed(order):
        bag = bags[i]
        rows = _bag_colourings(inst, bag, budget)
        for j in children[i]:
            shared = [v for v in bag if v in bags[j]]
            pi = [bag.index(v) for v in shared]
            allowed = choice[j]
            rows = [r for r in rows if tuple(r[p] for p in pi) in allowed]
        tables[i] = rows
        table_total += len(rows)
        if not rows:
            return SolveResult(False, None, {"width": td.width, "table_rows": table_total})
        if parent[i] is not None:
            pbag = bags[parent[i]]
            shared = [v for v in pbag if v in bag]
            ci = [bag.index(v) for v in shared]
            proj = {}
            for r in rows:
                proj.setdefault(tuple(r[c] for c in ci), r)
            choice[i] = proj
    colour = {}
    root_row = tables[0][0]
    for v, a in zip(bags[0], root_row):
        colour[v] = a
    for i in order:
        if i == 0:
            continue
        pbag = bags[parent[i]]
        shared = tuple(colour[v] for v in pbag if v in bags[i])
        row = choice[i][shared]
        for v, a in zip(bags[i], row):
            if colour.setdefault(v, a) != a:
                raise InvariantViolation("witness reconstruction clash", {"vertex": v})
    wit = tuple(colour[v] for v in range(inst.n))
    chk = check_homomorphism(inst, wit)
    if not chk:
        raise InvariantViolation("DP witness failed validation", {"message": chk.message})
    return SolveResult(True, wit, {"width": td.width, "table_rows": table_total})
