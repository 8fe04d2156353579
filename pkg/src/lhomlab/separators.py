"""Balanced separators of the form N[X] with X small.

Every returned certificate has been re-checked by
``verify_balanced_separator``; nothing unverified leaves this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvariantViolation, PreconditionError, SearchCapExceeded
from .graph import (
    Graph,
    closed_nbhd_mask,
    component_masks,
    contains_induced,
    cycle_tail_pattern,
    cycle_triangle_tail_pattern,
    iter_bits,
    iter_induced_cycles,
    mask_of,
)

THREE_QUARTERS = Fraction(3, 4)


@dataclass
class SeparatorCertificate:
    core: tuple
    separator: tuple
    fraction: Fraction
    component_sizes: list
    method: str = "checked"
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "core": list(self.core),
            "separator": list(self.separator),
            "fraction": str(self.fraction),
            "component_sizes": self.component_sizes,
            "method": self.method,
            "notes": self.notes,
        }


def _largest_after(g: Graph, removed_mask: int) -> tuple[list, int]:
    full = (1 << g.order) - 1
    comps = component_masks(g.masks, full & ~removed_mask)
    sizes = sorted((bin(c).count("1") for c in comps), reverse=True)
    return sizes, comps


def verify_balanced_separator(g: Graph, X, fraction=THREE_QUARTERS, method: str = "checked"):
    """Certificate iff every component of G - N[X] has at most ``fraction * n`` vertices."""
    fraction = Fraction(fraction)
    xs = sorted(set(X))
    sep = closed_nbhd_mask(g, xs)
    sizes, _ = _largest_after(g, sep)
    if sizes and sizes[0] > fraction * g.order:
        return None
    return SeparatorCertificate(tuple(xs), tuple(iter_bits(sep)), fraction, sizes, method)


def _big_component(g: Graph, removed_mask: int, allowed: int | None = None) -> int:
    """The component of G[allowed] - removed with more than 3/4 n vertices, or 0."""
    full = (1 << g.order) - 1 if allowed is None else allowed
    for c in component_masks(g.masks, full & ~removed_mask):
        if bin(c).count("1") * 4 > 3 * g.order:
            return c
    return 0


def gyarfas_path(g: Graph, v: int) -> tuple[list, SeparatorCertificate]:
    """Induced path Q from ``v`` such that N[Q] is a 3/4-balanced separator.

    Q grows while some component D of G - N[Q] is too big; the next vertex
    is a neighbour of the last one that sees D and lies in the previous big
    component, which keeps Q induced.
    """
    if not g.is_connected():
        raise PreconditionError("gyarfas_path needs a connected graph")
    masks = g.masks
    q = [v]
    prev_big = ((1 << g.order) - 1) & ~(1 << v)
    while True:
        d = _big_component(g, closed_nbhd_mask(g, q))
        if not d:
            break
        last = q[-1]
        nd = 0
        for x in iter_bits(d):
            nd |= masks[x]
        cand = masks[last] & prev_big & nd
        if not cand:
            raise InvariantViolation(
                "Gyarfas extension failed",
                {"path": q, "big_component": list(iter_bits(d)), "prev": list(iter_bits(prev_big))},
            )
        u = (cand & -cand).bit_length() - 1
        if not (masks[u] & d):
            raise InvariantViolation("new path vertex has no neighbour in the big component", {"path": q})
        q.append(u)
        prev_big = d
    cert = verify_balanced_separator(g, q, THREE_QUARTERS, "gyarfas")
    if cert is None:
        raise InvariantViolation("Gyarfas certificate failed", {"path": q})
    return q, cert


def iter_connected_sets(g: Graph, k: int):
    """Connected vertex sets of size 1..k, smallest sizes first (as bitmasks)."""
    masks = g.masks
    n = g.order
    for size in range(1, k + 1):
        for v in range(n):
            higher = ~((1 << (v + 1)) - 1)

            def rec(sub: int, ext: int, excl: int, cnt: int):
                if cnt == size:
                    yield sub
                    return
                while ext:
                    low = ext & -ext
                    ext ^= low
                    w = low.bit_length() - 1
                    new_ext = ext | (masks[w] & higher & ~excl)
                    yield from rec(sub | low, new_ext, excl | masks[w] | low, cnt + 1)

            start_ext = masks[v] & higher
            yield from rec(1 << v, start_ext, masks[v] | (1 << v), 1)


def bounded_connected_separator(g: Graph, k: int, budget: int | None = 5_000_000):
    """Smallest connected X with |X| <= k and N[X] balanced, or None (complete search)."""
    if g.order == 0:
        return verify_balanced_separator(g, [], THREE_QUARTERS, "bounded-set")
    limit = 3 * g.order
    masks = g.masks
    full = (1 << g.order) - 1
    seen = 0
    for sub in iter_connected_sets(g, k):
        seen += 1
        if budget is not None and seen > budget:
            raise SearchCapExceeded(f"connected-set enumeration exceeded {budget}", seen, budget)
        sep = sub
        for x in iter_bits(sub):
            sep |= masks[x]
        ok = True
        for c in component_masks(masks, full & ~sep):
            if bin(c).count("1") * 4 > limit:
                ok = False
                break
        if ok:
            cert = verify_balanced_separator(g, list(iter_bits(sub)), THREE_QUARTERS, "bounded-set")
            return cert
    return None


# ---------------------------------------------------------------------------
# handles


@dataclass
class Handle:
    cycle: tuple
    path: tuple
    start: int  # index in ``cycle`` where ``path`` begins

    def to_dict(self) -> dict:
        return {"cycle": list(self.cycle), "path": list(self.path)}


def _outside_nbhd(g: Graph, vertices, cycle_mask: int) -> int:
    """N_{V-C}[S] = S plus the neighbours of S outside C."""
    m = mask_of(vertices)
    for v in vertices:
        m |= g.masks[v] & ~cycle_mask
    return m


def is_handle(g: Graph, cycle, start: int, tp: int) -> bool:
    k = len(cycle)
    if k < tp:
        return False
    path = [cycle[(start + i) % k] for i in range(tp - 1)]
    cmask = mask_of(cycle)
    removed = _outside_nbhd(g, path, cmask)
    rest = cmask & ~mask_of(path)
    sizes_comps = component_masks(g.masks, ((1 << g.order) - 1) & ~removed)
    home = next(c for c in sizes_comps if c & rest)
    if rest & ~home:
        return False
    hs = bin(home).count("1")
    return all(bin(c).count("1") <= hs for c in sizes_comps)


def find_min_handle(g: Graph, tp: int, cycle_cap: int = 200_000):
    """First t'-handle in order of cycle length.  None means attested absence;
    SearchCapExceeded means the cycle cap ran out first."""
    count = 0
    for cyc in iter_induced_cycles(g, tp):
        count += 1
        if count > cycle_cap:
            raise SearchCapExceeded(f"handle search exceeded {cycle_cap} induced cycles", count, cycle_cap)
        for s in range(len(cyc)):
            if is_handle(g, cyc, s, tp):
                path = tuple(cyc[(s + i) % len(cyc)] for i in range(tp - 1))
                return Handle(tuple(cyc), path, s)
    return None


# ---------------------------------------------------------------------------
# the handle cases


class _CycleCtx:
    """Cycle C with positions, and the guard sets T_S / components W(S) for subpaths S."""

    def __init__(self, g: Graph, cycle, t: int):
        self.g = g
        self.c = list(cycle)
        self.k = len(cycle)
        self.t = t
        self.cmask = mask_of(cycle)

    def arc(self, start: int, length: int) -> list:
        return [self.c[(start + i) % self.k] for i in range(length)]

    def guard(self, start: int, length: int) -> list:
        """T_S for the subpath S = arc(start, length)."""
        k, t = self.k, self.t
        rest = k - length
        if rest > 4 * t:
            after = self.arc(start + length, 2 * t)
            before = self.arc(start - 2 * t, 2 * t)
            return after + before
        return self.arc(start + length, rest)

    def w_size(self, start: int, length: int) -> int:
        guard = self.guard(start, length)
        removed = _outside_nbhd(self.g, guard, self.cmask)
        s0 = self.c[start % self.k]
        for comp in component_masks(self.g.masks, ((1 << self.g.order) - 1) & ~removed):
            if (comp >> s0) & 1:
                return bin(comp).count("1")
        return 0


def handle_case1(g: Graph, handle: Handle, t: int):
    ctx = _CycleCtx(g, handle.cycle, t)
    n = g.order
    if ctx.k <= 7 * t:
        return list(handle.cycle), {"case": 1, "cycle_small": True}
    limit = Fraction(2 * n, 3)
    start = None
    for length in range(1, ctx.k):
        for s in range(ctx.k):
            if ctx.w_size(s, length) <= limit:
                start = (s, length)
                break
        if start:
            break
    if start is None:
        raise InvariantViolation("no guarded subpath Y with |W(Y)| <= 2n/3", {"cycle": list(handle.cycle)})
    s, length = start
    while True:
        grown = False
        if length + 1 < ctx.k and ctx.w_size(s, length + 1) <= limit:
            length += 1
            grown = True
        elif length + 1 < ctx.k and ctx.w_size(s - 1, length + 1) <= limit:
            s -= 1
            length += 1
            grown = True
        if not grown:
            break
    # Z = Y plus the next vertex clockwise
    z_start, z_len = s, length + 1
    z = ctx.c[(s + length) % ctx.k]
    x = ctx.guard(z_start, z_len) + [z]
    return x, {"case": 1, "Y": ctx.arc(s, length), "z": z}


def handle_case2(g: Graph, handle: Handle, t: int, big: int):
    ctx = _CycleCtx(g, handle.cycle, t)
    masks = g.masks
    k = ctx.k
    cyc = ctx.c
    pos = {v: i for i, v in enumerate(cyc)}
    path_set = set(handle.path)
    n_c = 0
    for v in cyc:
        n_c |= masks[v]
    n_c &= ~ctx.cmask
    n_d = 0
    for v in iter_bits(big):
        n_d |= masks[v]
    blocked = _outside_nbhd(g, handle.path, ctx.cmask)
    cand = n_c & n_d & ~blocked
    if not cand:
        raise InvariantViolation("no central vertex v0", {"cycle": cyc, "path": list(handle.path)})
    v0 = (cand & -cand).bit_length() - 1
    nbr_c = [v for v in cyc if (masks[v0] >> v) & 1]
    # walk C - P from the vertex after P to the vertex before P
    p_end = (handle.start + len(handle.path) - 1) % k
    rest_order = [cyc[(p_end + 1 + i) % k] for i in range(k - len(handle.path))]
    idx = [rest_order.index(v) for v in nbr_c if v not in path_set]
    if len(idx) != len(nbr_c):
        raise InvariantViolation("v0 sees the handle path", {"v0": v0})
    u1 = rest_order[min(idx)]
    u2 = rest_order[max(idx)]
    u_prime = rest_order[min(idx) : max(idx) + 1]
    minimal = True
    if len(u_prime) > 3:
        raise InvariantViolation(
            "Case 2 produced |U'| > 3 on a minimal handle", {"u_prime": u_prime, "v0": v0, "cycle": cyc}
        )
    d_nbrs = masks[v0] & big
    v1 = (d_nbrs & -d_nbrs).bit_length() - 1
    sub, verts = g.induced(list(iter_bits(big)))
    qi, _ = gyarfas_path(sub, verts.index(v1))
    q = [verts[i] for i in qi]
    notes = {"case": 2, "v0": v0, "u1": u1, "u2": u2, "u_prime": u_prime, "Q": q, "minimal": minimal}
    if len(q) > t - 1:
        notes["long_gyarfas_path"] = True
    if k <= 6 * t:
        return sorted(set(cyc) | {v0} | set(q)), notes
    start = pos[u_prime[0]]
    if cyc[(start + len(u_prime) - 1) % k] != u_prime[-1]:
        start = pos[u_prime[-1]]
    guard = ctx.guard(start, len(u_prime))
    x = sorted(set(guard) | set(u_prime) | {v0} | set(q))
    return x, notes


# ---------------------------------------------------------------------------
# the full pipeline


def check_bt_free(g: Graph, t: int, cycle_cap: int | None = None, node_cap: int | None = 2_000_000):
    """Partial check for the forbidden cycle-with-tail patterns, 2t < k <= cap.

    Returns None when nothing was found, else ``(pattern, embedding)``.
    """
    top = g.order - t if cycle_cap is None else min(cycle_cap, g.order - t)
    for k in range(2 * t + 1, top + 1):
        for pat in (cycle_tail_pattern(k, t), cycle_triangle_tail_pattern(k, t)):
            emb = contains_induced(g, pat, node_cap)
            if emb is not None:
                return pat, emb
    return None


def bt_free_separator(
    g: Graph,
    t: int,
    check_free: bool = False,
    free_cycle_cap: int | None = None,
    cycle_cap: int = 200_000,
    set_budget: int | None = 5_000_000,
) -> SeparatorCertificate:
    """X with |X| <= 7t and N[X] a 3/4-balanced separator of a connected B_t-free graph."""
    if t < 2:
        raise PreconditionError("t must be at least 2")
    if not g.is_connected():
        raise PreconditionError("graph must be connected")
    if check_free:
        hit = check_bt_free(g, t, free_cycle_cap)
        if hit is not None:
            raise PreconditionError(f"graph contains {hit[0].name}", list(hit[1]))
    cert = bounded_connected_separator(g, 2 * t - 1, set_budget)
    if cert is not None:
        cert.method = "bounded-set"
        return cert
    try:
        handle = find_min_handle(g, 2 * t, cycle_cap)
    except SearchCapExceeded:
        handle = None
        capped = True
    else:
        capped = False
    if handle is None:
        # fall back to a short Gyarfas path; a valid certificate is still reported
        for v in range(g.order):
            q, c = gyarfas_path(g, v)
            if len(q) <= 7 * t:
                c.method = "gyarfas" + ("-cap-limited" if capped else "")
                return c
        if capped:
            raise SearchCapExceeded("handle search capped and no short Gyarfas path found")
        raise InvariantViolation("no bounded separator and no handle", {"n": g.order})
    big = _big_component(g, closed_nbhd_mask(g, handle.cycle))
    if not big:
        x, notes = handle_case1(g, handle, t)
        method = "handle-case1"
    else:
        x, notes = handle_case2(g, handle, t, big)
        method = "handle-case2"
    cert = verify_balanced_separator(g, x, THREE_QUARTERS, method)
    if cert is None or len(cert.core) > 7 * t:
        raise InvariantViolation(
            "handle construction did not yield a valid small separator (input not B_t-free?)",
            {"method": method, "X": list(x), "handle": handle.to_dict(), "notes": notes},
        )
    cert.notes = {"handle": handle.to_dict(), **{k: v for k, v in notes.items()}}
    return cert
