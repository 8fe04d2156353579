"""Win-win solver for {S_{a,b,c}, K3}-free instances over predator-free targets.

A vertex of degree at least sqrt(n log2 n) gives a branching step in
which one side loses many list entries; otherwise the graph has small
treewidth and the tree-decomposition DP finishes the job.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import BudgetExceeded, InvariantViolation, PreconditionError, PredatorFound
from .graph import claw_pattern, contains_induced, triangle_pattern
from .instance import Instance, check_homomorphism
from .oracle import SolveResult
from .preprocess import Work, basic_fixpoint
from .target import TargetGraph, find_predators
from .treewidth import build_decomposition, solve_dp


def degree_threshold(n: int) -> float:
    """sqrt(n * log2 n); 0 for n = 1."""
    if n < 1:
        raise ValueError("n must be positive")
    return math.sqrt(n * math.log2(n))


def pick_nonedge(h: TargetGraph, X, Y) -> tuple:
    """Lexicographically first (x, y) in X x Y with xy not an edge of H.

    If X is complete to Y the target has a predator, which is raised."""
    xs, ys = sorted(X), sorted(Y)
    for x in xs:
        for y in ys:
            if not h.adjacent(x, y):
                return x, y
    if len(xs) >= 2 and len(ys) >= 2:
        quad = (xs[0], xs[1], ys[0], ys[1])
        raise PredatorFound("sets are complete to each other; the target has a predator", quad)
    raise PreconditionError("pick_nonedge needs two sets of size at least 2", (xs, ys))


@dataclass
class WinWinConfig:
    claw: tuple = (2, 2, 2)
    log_base: str = "log2"
    decomposition: str = "separator"
    check_predators: bool = True
    check_free: bool = True
    node_cap: int | None = 2_000_000
    max_nodes: int | None = 10**6
    dp_budget: int | None = 10**7


@dataclass
class WinWinStats:
    nodes: int = 0
    branch_steps: int = 0
    dp_calls: int = 0
    max_width: int = -1
    pigeonhole: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "branch_steps": self.branch_steps,
            "dp_calls": self.dp_calls,
            "max_width": self.max_width,
        }


class _WinWin:
    def __init__(self, cfg: WinWinConfig):
        self.cfg = cfg
        self.t = max(2, max(cfg.claw))
        self.stats = WinWinStats()

    def solve(self, w: Work):
        st = self.stats
        st.nodes += 1
        if self.cfg.max_nodes is not None and st.nodes > self.cfg.max_nodes:
            raise BudgetExceeded(f"win-win exceeded {self.cfg.max_nodes} nodes", st.nodes, self.cfg.max_nodes)
        if not basic_fixpoint(w):
            return None
        out = dict(w.fixed)
        if not w.adj:
            return out
        comps = w.components()
        if len(comps) > 1:
            for comp in comps:
                sub = self.solve(w.restrict(comp))
                if sub is None:
                    return None
                out.update(sub)
            return out
        n = len(w.adj)
        thr = degree_threshold(n)
        for v in sorted(w.adj):
            if len(w.adj[v]) >= thr and n > 1:
                res = self._branch(w, v, thr)
                if res is None:
                    return None
                out.update(res)
                return out
        res = self._dp(w)
        if res is None:
            return None
        out.update(res)
        return out

    def _branch(self, w: Work, v: int, thr: float):
        st = self.stats
        st.branch_steps += 1
        freq = Counter(w.lists[u] for u in w.adj[v])
        top = max(freq.values())
        lp = min((l for l, c in freq.items() if c == top), key=lambda l: tuple(sorted(l)))
        ell = thr / (2 ** w.h.n)
        st.pigeonhole.append((top, ell))
        if top < ell:
            raise InvariantViolation("pigeonhole count below l on a reduced instance", {"count": top, "l": ell})
        a, b = pick_nonedge(w.h, w.lists[v], lp)
        drop = w.copy()
        drop.fixed = {}
        drop.lists[v] = w.lists[v] - {a}
        res = self.solve(drop)
        if res is not None:
            return res
        keep = w.copy()
        keep.fixed = {}
        keep.lists[v] = frozenset([a])
        removed = 0
        for u in w.adj[v]:
            if w.lists[u] == lp:
                keep.lists[u] = lp - {b}
                removed += 1
        if removed < ell:
            raise InvariantViolation("success branch removed fewer than l entries", {"removed": removed, "l": ell})
        return self.solve(keep)

    def _dp(self, w: Work):
        st = self.stats
        st.dp_calls += 1
        inst, keep = w.to_instance()
        if self.cfg.decomposition == "min-fill":
            td = build_decomposition(inst.graph, "min-fill")
        else:
            td = build_decomposition(inst.graph, "separator", t=self.t)
        st.max_width = max(st.max_width, td.width)
        res = solve_dp(inst, td, budget=self.cfg.dp_budget)
        if not res.answer:
            return None
        return {keep[i]: a for i, a in enumerate(res.witness)}


def check_sabc_preconditions(inst: Instance, cfg: WinWinConfig):
    if cfg.check_predators:
        preds = find_predators(inst.target, limit=1)
        if preds:
            raise PredatorFound("target contains a predator", preds[0])
    if cfg.check_free:
        a, b, c = cfg.claw
        emb = contains_induced(inst.graph, claw_pattern(a, b, c), cfg.node_cap)
        if emb is not None:
            raise PreconditionError(f"instance graph contains an induced S{a},{b},{c}", list(emb))
        emb = contains_induced(inst.graph, triangle_pattern(), cfg.node_cap)
        if emb is not None:
            raise PreconditionError("instance graph contains a triangle", list(emb))


def _target_triangle_free_irreflexive(h: TargetGraph) -> bool:
    if h.graph.loops:
        return False
    return contains_induced(h.graph, triangle_pattern()) is None


def solve_sabc(inst: Instance, cfg: WinWinConfig | None = None) -> SolveResult:
    """Decide a {S_{a,b,c}, K3}-free instance over a predator-free target."""
    cfg = cfg or WinWinConfig()
    if _target_triangle_free_irreflexive(inst.target):
        tri = contains_induced(inst.graph, triangle_pattern(), cfg.node_cap)
        if tri is not None:
            return SolveResult(False, None, {"reason": "triangle in G, target triangle-free", "triangle": list(tri)})
    check_sabc_preconditions(inst, cfg)
    solver = _WinWin(cfg)
    if any(not l for l in inst.lists):
        return SolveResult(False, None, solver.stats.to_dict())
    res = solver.solve(Work.from_instance(inst))
    stats = solver.stats.to_dict()
    if res is None:
        return SolveResult(False, None, stats)
    wit = tuple(res[v] for v in range(inst.n))
    chk = check_homomorphism(inst, wit)
    if not chk:
        raise InvariantViolation("win-win produced an invalid witness", {"message": chk.message})
    return SolveResult(True, wit, stats)

