"""Exhaustive reference solver: backtracking with arc-consistency pruning.

Every other solver in the package is checked against this one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import product

from .errors import BudgetExceeded
from .graph import iter_bits
from .instance import Instance

DEFAULT_BUDGET = 10**8
BUDGET_ENV = "LHOMLAB_BUDGET"


def default_budget() -> int:
    raw = os.environ.get(BUDGET_ENV)
    if raw:
        try:
            return int(float(raw))
        except ValueError:
            pass
    return DEFAULT_BUDGET


@dataclass
class SolveResult:
    """Answer of a solver.  ``witness`` is a tuple of colours when ``answer`` is True."""

    answer: bool
    witness: tuple | None = None
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "answer": "yes" if self.answer else "no",
            "witness": list(self.witness) if self.witness is not None else None,
            "stats": self.stats,
        }


class _Searcher:
    def __init__(self, inst: Instance):
        self.n = inst.n
        self.adj = [sorted(inst.graph.neighbors(v)) for v in range(self.n)]
        self.deg = [len(a) for a in self.adj]
        self.nb = inst.target.nbhd_mask
        self.nodes = 0

    def support(self, dom: int) -> int:
        s = 0
        for a in iter_bits(dom):
            s |= self.nb[a]
        return s

    def propagate(self, dom: list, changed: list, assigned=None) -> bool:
        queue = list(changed)
        inq = set(queue)
        while queue:
            v = queue.pop()
            inq.discard(v)
            sup = self.support(dom[v])
            for w in self.adj[v]:
                if assigned is not None and assigned[w]:
                    continue
                nd = dom[w] & sup
                if nd != dom[w]:
                    if not nd:
                        return False
                    dom[w] = nd
                    if w not in inq:
                        inq.add(w)
                        queue.append(w)
        return True

    def solve(self, dom: list):
        """MRV backtracking with full arc consistency; returns a colour list or None."""
        if any(d == 0 for d in dom):
            return None
        if not self.propagate(dom, list(range(self.n))):
            return None
        return self._rec(dom)

    def _rec(self, dom: list):
        best, key = -1, None
        for v in range(self.n):
            c = bin(dom[v]).count("1")
            if c > 1:
                k = (c, -self.deg[v], v)
                if key is None or k < key:
                    best, key = v, k
        if best < 0:
            return [d.bit_length() - 1 for d in dom]
        v = best
        for a in iter_bits(dom[v]):
            self.nodes += 1
            nd = list(dom)
            nd[v] = 1 << a
            if self.propagate(nd, [v]):
                res = self._rec(nd)
                if res is not None:
                    return res
        return None


def _domains(inst: Instance) -> list:
    return [sum(1 << a for a in lst) for lst in inst.lists]


def _check_budget(inst: Instance, budget):
    if budget is None:
        return
    p = inst.list_product(stop_above=budget)
    if p > budget:
        raise BudgetExceeded(
            f"product of list sizes exceeds budget {budget:g}", used=p, limit=budget
        )


def solve_brute(inst: Instance, budget: float | None = "default") -> SolveResult:
    """Decide the instance exactly.  ``budget`` bounds the product of list
    sizes (None disables the bound)."""
    if budget == "default":
        budget = default_budget()
    _check_budget(inst, budget)
    s = _Searcher(inst)
    res = s.solve(_domains(inst))
    stats = {"nodes": s.nodes}
    if res is None:
        return SolveResult(False, None, stats)
    return SolveResult(True, tuple(res), stats)


def solve_pinned(inst: Instance, pins: dict, budget=None) -> SolveResult:
    """Decide the instance with some vertices forced to given colours."""
    dom = _domains(inst)
    for v, a in pins.items():
        dom[v] &= 1 << a
    _check_budget(inst, budget)
    s = _Searcher(inst)
    res = s.solve(dom)
    if res is None:
        return SolveResult(False, None, {"nodes": s.nodes})
    return SolveResult(True, tuple(res), {"nodes": s.nodes})


def enumerate_homs(inst: Instance, cap: int | None = None, budget="default") -> tuple[list, bool]:
    """All list homomorphisms in lexicographic order.  Returns ``(homs, truncated)``."""
    if budget == "default":
        budget = default_budget()
    _check_budget(inst, budget)
    s = _Searcher(inst)
    out = []
    dom0 = _domains(inst)
    if any(d == 0 for d in dom0):
        return out, False
    n = inst.n

    class _Stop(Exception):
        pass

    def rec(i: int, dom: list):
        if i == n:
            if cap is not None and len(out) >= cap:
                raise _Stop
            out.append(tuple(d.bit_length() - 1 for d in dom))
            return
        for a in iter_bits(dom[i]):
            nd = list(dom)
            nd[i] = 1 << a
            ok = True
            for w in s.adj[i]:
                if w > i:
                    nd[w] &= s.nb[a]
                    if not nd[w]:
                        ok = False
                        break
            if ok:
                rec(i + 1, nd)

    try:
        rec(0, dom0)
    except _Stop:
        return out, True
    return out, False


def count_homs(inst: Instance, budget="default") -> int:
    return len(enumerate_homs(inst, None, budget)[0])


def project_relation(inst: Instance, interface, budget=None) -> set:
    """Set of colour tuples on ``interface`` that extend to a list homomorphism."""
    interface = list(interface)
    _check_budget(inst, budget)
    out = set()
    pools = [sorted(inst.lists[v]) for v in interface]
    for combo in product(*pools):
        pins = {}
        clash = False
        for v, a in zip(interface, combo):
            if pins.get(v, a) != a:
                clash = True
                break
            pins[v] = a
        if clash:
            continue
        if solve_pinned(inst, pins).answer:
            out.add(tuple(combo))
    return out
