"""List reduction rules and t-consistency.

The solvers work on a mutable ``Work`` state keyed by the original vertex
ids, so that vertices removed along the way (singleton lists) can be
recorded with their forced colour and reinserted into witnesses.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .graph import Graph, iter_bits
from .instance import Instance
from .target import TargetGraph


class Work:
    """Mutable solver state: alive vertices, their adjacency and lists."""

    __slots__ = ("h", "adj", "lists", "fixed")

    def __init__(self, h: TargetGraph, adj: dict, lists: dict, fixed: dict | None = None):
        self.h = h
        self.adj = adj
        self.lists = lists
        self.fixed = {} if fixed is None else fixed

    @classmethod
    def from_instance(cls, inst: Instance) -> "Work":
        adj = {v: set(inst.graph.neighbors(v)) for v in range(inst.n)}
        lists = {v: frozenset(inst.lists[v]) for v in range(inst.n)}
        return cls(inst.target, adj, lists)

    def copy(self) -> "Work":
        return Work(self.h, {v: set(a) for v, a in self.adj.items()}, dict(self.lists), dict(self.fixed))

    def vertices(self) -> list:
        return sorted(self.adj)

    def remove_vertex(self, v: int):
        for w in self.adj.pop(v):
            self.adj[w].discard(v)
        del self.lists[v]

    def restrict(self, vertices) -> "Work":
        keep = set(vertices)
        adj = {v: self.adj[v] & keep for v in keep}
        return Work(self.h, adj, {v: self.lists[v] for v in keep}, {})

    def components(self) -> list:
        seen, comps = set(), []
        for s in sorted(self.adj):
            if s in seen:
                continue
            comp, stack = [s], [s]
            seen.add(s)
            while stack:
                u = stack.pop()
                for w in self.adj[u]:
                    if w not in seen:
                        seen.add(w)
                        comp.append(w)
                        stack.append(w)
            comps.append(sorted(comp))
        return comps

    def to_instance(self) -> tuple[Instance, list]:
        keep = sorted(self.adj)
        pos = {v: i for i, v in enumerate(keep)}
        edges = [(pos[u], pos[w]) for u in keep for w in self.adj[u] if u < w]
        return Instance(self.h, Graph(len(keep), edges), [self.lists[v] for v in keep]), keep

    def total_list_size(self) -> int:
        return sum(len(x) for x in self.lists.values())


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)

    def to_list(self) -> list:
        return [list(s) for s in self.steps]


@dataclass
class ReductionResult:
    """Outcome of preprocessing.

    ``status`` is ``"reduced"`` or ``"no"`` (an empty list appeared).
    ``instance`` is the reduced instance renumbered over ``kept`` (original
    ids); ``fixed`` maps removed original vertices to their forced colour.
    """

    status: str
    instance: Instance | None
    kept: list
    fixed: dict
    trace: ReductionTrace

    @property
    def is_no(self) -> bool:
        return self.status == "no"


# ---------------------------------------------------------------------------
# the three basic rules


def _dominated(h: TargetGraph, lst, a: int) -> bool:
    na = h.nbhd[a]
    for b in lst:
        if b == a:
            continue
        nb = h.nbhd[b]
        if na < nb or (na == nb and b < a):
            return True
    return False


def _unsupported(h: TargetGraph, w: Work, v: int, a: int):
    na = h.nbhd[a]
    for u in sorted(w.adj[v]):
        if not (na & w.lists[u]):
            return u
    return None


def basic_fixpoint(w: Work, trace: ReductionTrace | None = None, rng: random.Random | None = None) -> bool:
    """Apply the three rules to a fixpoint.  Returns False on an empty list.

    Rules, by priority: drop a colour whose neighbourhood is contained in
    that of another colour of the same list (equal neighbourhoods keep the
    smallest colour); drop a colour with no neighbour in the list of some
    adjacent vertex; delete a vertex whose list is a singleton, recording
    its colour.  With ``rng`` the rule applications are performed one at a
    time in random order (used to test confluence).
    """
    h = w.h
    if rng is not None:
        return _basic_fixpoint_random(w, trace, rng)
    # shrinking a list never makes a colour dominated, so one pass of the
    # first rule suffices and later removals never re-enable it
    for v in sorted(w.adj):
        lst = w.lists[v]
        drop = [a for a in sorted(lst) if _dominated(h, lst, a)]
        if drop:
            w.lists[v] = lst - frozenset(drop)
            if trace is not None:
                trace.steps.extend(("i", v, a) for a in drop)
    queue = sorted(w.adj)
    queued = set(queue)
    while queue:
        v = queue.pop(0)
        queued.discard(v)
        lst = w.lists[v]
        keep = []
        for a in sorted(lst):
            u = _unsupported(h, w, v, a)
            if u is None:
                keep.append(a)
            elif trace is not None:
                trace.steps.append(("ii", v, a, u))
        if len(keep) != len(lst):
            w.lists[v] = frozenset(keep)
            if not keep:
                if trace is not None:
                    trace.steps.append(("empty", v))
                return False
            for u in sorted(w.adj[v]):
                if u not in queued:
                    queued.add(u)
                    queue.append(u)
    # deleting vertices only weakens the second rule, so this ends the fixpoint
    for v in sorted(w.adj):
        if len(w.lists[v]) == 1:
            (a,) = w.lists[v]
            w.fixed[v] = a
            if trace is not None:
                trace.steps.append(("iii", v, a))
            w.remove_vertex(v)
    return True


def _basic_fixpoint_random(w: Work, trace, rng: random.Random) -> bool:
    h = w.h
    while True:
        if any(not l for l in w.lists.values()):
            return False
        moves = [(v, a) for v in w.adj for a in w.lists[v] if _dominated(h, w.lists[v], a)]
        if moves:
            v, a = rng.choice(sorted(moves))
            w.lists[v] = w.lists[v] - {a}
            if trace is not None:
                trace.steps.append(("i", v, a))
            continue
        moves = []
        for v in w.adj:
            for a in w.lists[v]:
                u = _unsupported(h, w, v, a)
                if u is not None:
                    moves.append((v, a, u))
        if moves:
            v, a, u = rng.choice(sorted(moves))
            w.lists[v] = w.lists[v] - {a}
            if trace is not None:
                trace.steps.append(("ii", v, a, u))
            if not w.lists[v]:
                if trace is not None:
                    trace.steps.append(("empty", v))
                return False
            continue
        singles = [v for v in w.adj if len(w.lists[v]) == 1]
        if not singles:
            return True
        v = rng.choice(sorted(singles))
        (a,) = w.lists[v]
        w.fixed[v] = a
        if trace is not None:
            trace.steps.append(("iii", v, a))
        w.remove_vertex(v)


def _result(w: Work, ok: bool, trace: ReductionTrace) -> ReductionResult:
    if not ok:
        return ReductionResult("no", None, [], dict(w.fixed), trace)
    inst, kept = w.to_instance()
    return ReductionResult("reduced", inst, kept, dict(w.fixed), trace)


def reduce_basic(inst: Instance, rng: random.Random | None = None) -> ReductionResult:
    w = Work.from_instance(inst)
    trace = ReductionTrace()
    ok = all(w.lists[v] for v in w.adj) and basic_fixpoint(w, trace, rng)
    return _result(w, ok, trace)


def replay_trace(inst: Instance, trace: ReductionTrace) -> ReductionResult:
    """Re-apply a recorded trace step by step, checking each step is legal."""
    w = Work.from_instance(inst)
    h = w.h
    for step in trace.steps:
        kind, v = step[0], step[1]
        if kind == "empty":
            if w.lists[v]:
                raise ValueError(f"trace claims empty list at {v}")
            return _result(w, False, trace)
        a = step[2]
        if kind == "i":
            if not _dominated(h, w.lists[v], a):
                raise ValueError(f"illegal rule (i) step {step}")
            w.lists[v] = w.lists[v] - {a}
        elif kind == "ii":
            u = step[3]
            if u not in w.adj[v] or (h.nbhd[a] & w.lists[u]):
                raise ValueError(f"illegal rule (ii) step {step}")
            w.lists[v] = w.lists[v] - {a}
        elif kind == "iii":
            if w.lists[v] != frozenset([a]):
                raise ValueError(f"illegal rule (iii) step {step}")
            w.fixed[v] = a
            w.remove_vertex(v)
        elif kind == "t":
            w.lists[v] = w.lists[v] - {a}
        else:
            raise ValueError(f"unknown step {step}")
    return _result(w, True, trace)


# ---------------------------------------------------------------------------
# t-consistency


def connected_subsets(adj: dict, k: int):
    """Connected vertex sets of size 1..k (each exactly once), as tuples."""
    verts = sorted(adj)
    for v in verts:
        # extension-set enumeration rooted at v, using only vertices > v
        def extend(sub, ext, excl):
            yield tuple(sub)
            if len(sub) == k:
                return
            ext = list(ext)
            while ext:
                w = ext.pop()
                new_ext = set(ext)
                for x in adj[w]:
                    if x > v and x not in excl:
                        new_ext.add(x)
                yield from extend(sub + [w], sorted(new_ext), excl | adj[w] | {w})

        nbrs = sorted(x for x in adj[v] if x > v)
        yield from extend([v], nbrs, set(adj[v]) | {v})


def subset_support(w: Work, subset) -> set:
    """Pairs (v, a) used by some list homomorphism of the induced subinstance."""
    nb = w.h.nbhd_mask
    verts = list(subset)
    k = len(verts)
    idx = {v: i for i, v in enumerate(verts)}
    later = [[idx[u] for u in w.adj[v] if u in idx and idx[u] > i] for i, v in enumerate(verts)]
    dom0 = [sum(1 << a for a in w.lists[v]) for v in verts]
    need = sum(bin(d).count("1") for d in dom0)
    seen = [0] * k
    found = 0

    def rec(i: int, dom: list) -> bool:
        nonlocal found
        if i == k:
            for j in range(k):
                bit = dom[j]
                if not seen[j] & bit:
                    seen[j] |= bit
                    found += 1
            return found == need
        for a in iter_bits(dom[i]):
            nd = dom[:]
            nd[i] = 1 << a
            ok = True
            for j in later[i]:
                nd[j] &= nb[a]
                if not nd[j]:
                    ok = False
                    break
            if ok and rec(i + 1, nd):
                return True
        return False

    rec(0, dom0)
    return {(verts[j], a) for j in range(k) for a in iter_bits(seen[j])}


def _subsets(w: Work, t: int, connected_only: bool):
    if connected_only:
        yield from connected_subsets(w.adj, t)
    else:
        verts = sorted(w.adj)
        for size in range(1, t + 1):
            yield from combinations(verts, size)


def t_consistency_pass(w: Work, t: int, connected_only: bool, trace: ReductionTrace | None) -> tuple:
    """One sweep over all subsets of size <= t.  Returns ``(ok, changed)``."""
    changed = False
    for subset in _subsets(w, t, connected_only):
        if len(subset) < 2 or any(v not in w.adj for v in subset):
            continue
        sup = subset_support(w, subset)
        for v in subset:
            lst = w.lists[v]
            bad = [a for a in sorted(lst) if (v, a) not in sup]
            if bad:
                w.lists[v] = lst - frozenset(bad)
                changed = True
                if trace is not None:
                    trace.steps.extend(("t", v, a, tuple(subset)) for a in bad)
                if not w.lists[v]:
                    if trace is not None:
                        trace.steps.append(("empty", v))
                    return False, True
    return True, changed


def consistency_fixpoint(w: Work, t: int, connected_only: bool = True, trace: ReductionTrace | None = None) -> bool:
    """Alternate the basic rules and t-consistency until nothing changes."""
    while True:
        if not basic_fixpoint(w, trace):
            return False
        ok, changed = t_consistency_pass(w, t, connected_only, trace)
        if not ok:
            return False
        if not changed:
            return True


def reduce_t_consistent(inst: Instance, t: int, connected_only: bool = False) -> ReductionResult:
    """Basic rules interleaved with t-consistency.

    By default every vertex subset of size at most ``t`` is examined.  With
    ``connected_only`` only connected subsets are; the fixpoint is the same
    because a disconnected subinstance has a homomorphism extending
    ``v -> a`` iff the component of ``v`` has one and every other
    component has some homomorphism.
    """
    w = Work.from_instance(inst)
    trace = ReductionTrace()
    ok = all(w.lists[v] for v in w.adj) and consistency_fixpoint(w, t, connected_only, trace)
    return _result(w, ok, trace)


def check_properties(inst: Instance, t: int, connected_only: bool = False) -> dict:
    """Report violations of the two post-processing guarantees.

    ``p1``: vertices whose list has fewer than two colours or is not an
    incomparable set.  ``p2``: triples ``(subset, v, a)`` where no list
    homomorphism of the subinstance on ``subset`` maps ``v`` to ``a``.
    """
    h = inst.target
    p1 = [v for v in range(inst.n) if len(inst.lists[v]) < 2 or not h.is_incomparable_set(inst.lists[v])]
    w = Work.from_instance(inst)
    p2 = []
    for subset in _subsets(w, t, connected_only):
        sup = subset_support(w, subset)
        for v in subset:
            for a in sorted(w.lists[v]):
                if (v, a) not in sup:
                    p2.append((tuple(subset), v, a))
    return {"p1": p1, "p2": p2}
