"""Branching solver for P_t-free instances over predator-free targets.

Colored paths (an induced path of at most t-1 vertices together with a
list homomorphism of it) are grouped into buckets by their endpoint pair.
The solver branches on a vertex/colour pair (v, x) that hits many
buckets: a coloured path is hit when some path vertex w in N[v] has
colour outside N(x).
"""

from __future__ import annotations

import math
import time
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetExceeded, InvariantViolation, PreconditionError, SearchCapExceeded
from .graph import Graph, enumerate_induced_paths, longest_induced_path_at_least
from .instance import Instance, check_homomorphism
from .oracle import SolveResult
from .preprocess import Work, consistency_fixpoint
from .target import find_predators


def thresholds(h_order: int, t: int) -> tuple[Fraction, Fraction]:
    """``(delta, eps)`` with delta = 1/(2^(|H|+1) t) and eps = delta / |H|^t."""
    delta = Fraction(1, (2 ** (h_order + 1)) * t)
    eps = delta / (h_order**t)
    return delta, eps


@dataclass
class BucketTable:
    """``buckets[(u, w)]`` (u < w) lists the coloured paths ``(path, colours)``."""

    buckets: dict
    path_count: dict
    t: int

    def size(self, pair) -> int:
        return len(self.buckets.get(pair, ()))

    def total(self) -> int:
        return sum(len(b) for b in self.buckets.values())


def _work_graph(w: Work) -> tuple[Graph, list]:
    verts = sorted(w.adj)
    pos = {v: i for i, v in enumerate(verts)}
    edges = [(pos[u], pos[x]) for u in verts for x in w.adj[u] if u < x]
    return Graph(len(verts), edges), verts


def _path_colourings(w: Work, path) -> list:
    nb = w.h.nbhd
    out = []
    cur = []

    def rec(i):
        if i == len(path):
            out.append(tuple(cur))
            return
        for a in sorted(w.lists[path[i]]):
            if i == 0 or a in nb[cur[-1]]:
                cur.append(a)
                rec(i + 1)
                cur.pop()

    rec(0)
    return out


def build_buckets_work(w: Work, t: int) -> BucketTable:
    g, verts = _work_graph(w)
    buckets, theta = {}, {}
    for p in enumerate_induced_paths(g, None, max(1, t - 1)):
        if len(p) < 2:
            continue
        path = tuple(verts[i] for i in p)
        key = (path[0], path[-1]) if path[0] < path[-1] else (path[-1], path[0])
        theta[key] = theta.get(key, 0) + 1
        bucket = buckets.setdefault(key, [])
        for col in _path_colourings(w, path):
            bucket.append((path, col))
    return BucketTable(buckets, theta, t)


def build_buckets(inst: Instance, t: int) -> BucketTable:
    """Buckets of an instance (vertex ids are those of ``inst``)."""
    return build_buckets_work(Work.from_instance(inst), t)


def compute_potential(table: BucketTable, eps: Fraction) -> float:
    """mu = -sum over pairs of log_{1-eps}(1 + |B|)."""
    denom = -math.log1p(-float(eps))
    return sum(math.log1p(len(b)) for b in table.buckets.values()) / denom


@dataclass
class PairScore:
    vertex: int
    colour: int
    hit_buckets: int
    required: Fraction
    met: bool
    hit_mass: float

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex,
            "colour": self.colour,
            "hit_buckets": self.hit_buckets,
            "required": str(self.required),
            "met": self.met,
        }


def hit_counts(w: Work, table: BucketTable) -> dict:
    """``counts[(v, x)]`` is a Counter mapping bucket key -> number of hit coloured paths."""
    h = w.h
    hit_cache = {}

    def hitters(vtx, colour):
        key = (vtx, colour)
        if key not in hit_cache:
            s = set()
            for v in list(w.adj[vtx]) + [vtx]:
                for x in w.lists[v]:
                    if colour not in h.nbhd[x]:
                        s.add((v, x))
            hit_cache[key] = s
        return hit_cache[key]

    counts = {}
    for key, bucket in table.buckets.items():
        for path, col in bucket:
            hit = set()
            for vtx, c in zip(path, col):
                hit |= hitters(vtx, c)
            for vx in hit:
                cnt = counts.get(vx)
                if cnt is None:
                    cnt = counts[vx] = Counter()
                cnt[key] += 1
    return counts


def select_branching_pair(w: Work, table: BucketTable, t: int) -> PairScore:
    """Exhaustive scoring of all (v, x) with x in L(v)."""
    delta, eps = thresholds(w.h.n, t)
    n = len(w.adj)
    required = delta * Fraction(n * (n - 1), 2)
    counts = hit_counts(w, table)
    best = None
    for v in sorted(w.adj):
        for x in sorted(w.lists[v]):
            cnt = counts.get((v, x), {})
            good = 0
            mass = 0.0
            for key, c in cnt.items():
                size = len(table.buckets[key])
                if c >= eps * size:
                    good += 1
                mass += c / size
            key = (good, mass)
            if best is None or key > best[0]:
                best = (key, PairScore(v, x, good, required, good >= required, mass))
    return best[1]


@dataclass
class BranchConfig:
    check_predators: bool = True
    check_ptfree: bool = True
    connected_only: bool = True
    max_t: int = 7
    max_n: int = 40
    max_nodes: int | None = 10**6
    record_potential: bool = False
    time_limit: float | None = None


@dataclass
class BranchStats:
    nodes: int = 0
    leaves: int = 0
    max_depth: int = 0
    threshold_checks: int = 0
    threshold_failures: int = 0
    selections: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "nodes": self.nodes,
            "leaves": self.leaves,
            "max_depth": self.max_depth,
            "threshold_checks": self.threshold_checks,
            "threshold_failures": self.threshold_failures,
        }


class _Solver:
    def __init__(self, t: int, cfg: BranchConfig):
        self.t = t
        self.cfg = cfg
        self.stats = BranchStats()
        self.deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit

    def solve(self, w: Work, depth: int = 0):
        """Returns a colouring dict of all vertices of ``w`` (alive and fixed) or None."""
        st = self.stats
        st.nodes += 1
        st.max_depth = max(st.max_depth, depth)
        if self.cfg.max_nodes is not None and st.nodes > self.cfg.max_nodes:
            raise BudgetExceeded(f"branching exceeded {self.cfg.max_nodes} nodes", st.nodes, self.cfg.max_nodes)
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExceeded(f"branching exceeded {self.cfg.time_limit}s", st.nodes, self.cfg.time_limit)
        if not consistency_fixpoint(w, self.t, self.cfg.connected_only):
            st.leaves += 1
            return None
        out = dict(w.fixed)
        if len(w.adj) <= 1:
            st.leaves += 1
            for v in w.adj:
                out[v] = min(w.lists[v])
            return out
        comps = w.components()
        if len(comps) > 1:
            for comp in comps:
                sub = self.solve(w.restrict(comp), depth + 1)
                if sub is None:
                    return None
                out.update(sub)
            return out
        table = build_buckets_work(w, self.t)
        choice = select_branching_pair(w, table, self.t)
        st.threshold_checks += 1
        if not choice.met:
            st.threshold_failures += 1
        rec = {"n": len(w.adj), "pair": (choice.vertex, choice.colour), "hit_buckets": choice.hit_buckets,
               "required": str(choice.required), "met": choice.met}
        if self.cfg.record_potential:
            _, eps = thresholds(w.h.n, self.t)
            rec["mu"] = compute_potential(table, eps)
        st.selections.append(rec)
        v, x = choice.vertex, choice.colour
        succ = Work(w.h, {u: set(a) for u, a in w.adj.items()}, dict(w.lists))
        succ.lists[v] = frozenset([x])
        res = self.solve(succ, depth + 1)
        if res is not None:
            out.update(res)
            return out
        fail = Work(w.h, {u: set(a) for u, a in w.adj.items()}, dict(w.lists))
        fail.lists[v] = w.lists[v] - {x}
        res = self.solve(fail, depth + 1)
        if res is None:
            return None
        out.update(res)
        return out


def check_ptfree_preconditions(inst: Instance, t: int, cfg: BranchConfig):
    if t < 1:
        raise PreconditionError("t must be positive")
    if t > cfg.max_t:
        raise SearchCapExceeded(f"t={t} exceeds the configured cap {cfg.max_t}", t, cfg.max_t)
    if inst.n > cfg.max_n:
        raise SearchCapExceeded(f"n={inst.n} exceeds the configured cap {cfg.max_n}", inst.n, cfg.max_n)
    if cfg.check_predators:
        preds = find_predators(inst.target, limit=1)
        if preds:
            raise PreconditionError("target contains a predator", preds[0])
    if cfg.check_ptfree:
        p = longest_induced_path_at_least(inst.graph, t)
        if p is not None:
            raise PreconditionError(f"instance graph contains an induced P{t}", p)


def solve_ptfree(inst: Instance, t: int, config: BranchConfig | None = None) -> SolveResult:
    cfg = config or BranchConfig()
    check_ptfree_preconditions(inst, t, cfg)
    solver = _Solver(t, cfg)
    if any(not l for l in inst.lists):
        return SolveResult(False, None, solver.stats.to_dict())
    res = solver.solve(Work.from_instance(inst))
    stats = solver.stats.to_dict()
    if res is None:
        return SolveResult(False, None, stats)
    wit = tuple(res[v] for v in range(inst.n))
    chk = check_homomorphism(inst, wit)
    if not chk:
        raise InvariantViolation("branching produced an invalid witness", {"message": chk.message})
    return SolveResult(True, wit, stats)


def solve_ptfree_with_stats(inst: Instance, t: int, config: BranchConfig | None = None):
    """Like solve_ptfree but also returns the full BranchStats (selection log)."""
    cfg = config or BranchConfig()
    check_ptfree_preconditions(inst, t, cfg)
    solver = _Solver(t, cfg)
    res = solver.solve(Work.from_instance(inst))
    if res is None:
        return SolveResult(False, None, solver.stats.to_dict()), solver.stats
    return SolveResult(True, tuple(res[v] for v in range(inst.n)), solver.stats.to_dict()), solver.stats
