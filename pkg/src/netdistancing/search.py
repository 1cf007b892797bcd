"""Supporting subnetworks: maximal independent sets and maximal r-regular sets.

A node set ``V*`` is *maximal r-regular* when its induced subnetwork is
r-regular and no strictly larger induced r-regular subnetwork contains it
as a union of components. Equivalently, the nodes with no link into ``V*``
contain no nonempty induced r-regular subnetwork. When every outside node
has at least ``r + 1`` links into ``V*`` that residual is empty and
maximality is immediate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .network import Network, NetworkError, components, induced_subnetwork

EXACT_RESIDUAL_LIMIT = 16


@dataclass(frozen=True)
class RegularSupport:
    """Candidate supporting subnetwork with its condition flags."""

    nodes: tuple[int, ...]
    r: int
    n: int
    regular: bool
    components: tuple[tuple[int, ...], ...]
    minimal: tuple[bool, ...]
    outside_ok: bool
    maximal_ok: bool
    mode: str = "exact"  # how the set was produced
    maximal_mode: str = "exact"  # how maximal_ok was verified

    @property
    def k(self) -> int:
        return len(self.nodes)

    def failed_flags(self) -> list[str]:
        return [
            name
            for name in ("regular", "maximal_ok", "outside_ok")
            if not getattr(self, name)
        ]

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "r": self.r,
            "components": [list(c) for c in self.components],
            "minimal": list(self.minimal),
            "outside_ok": self.outside_ok,
            "maximal_ok": self.maximal_ok,
            "mode": self.mode,
        }


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << (v - 1)
    return m


def _unmask(m: int) -> tuple[int, ...]:
    out = []
    i = 1
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def _has_regular_piece(net: Network, free: Sequence[int], r: int, seed: int = 0) -> tuple[bool, str]:
    """Does ``free`` contain a nonempty induced r-regular subnetwork?"""
    if not free:
        return False, "exact"
    if r == 0:
        return True, "exact"
    sub, _ = induced_subnetwork(net, free)
    if sub.n <= EXACT_RESIDUAL_LIMIT:
        table = kernels.regular_mask_table(sub.neighbor_masks, sub.n, r)
        return bool(table.any()), "exact"
    found = _heuristic_search(sub, r, np.random.default_rng(seed), restarts=20)
    return found is not None, "heuristic"


def check_support_conditions(net: Network, s: Iterable[int], r: int) -> RegularSupport:
    """Evaluate regularity, maximality and the outside-degree condition for ``s``.

    A set that is not r-regular is reported with ``regular=False`` (and
    ``maximal_ok=False``) rather than raising.
    """
    nodes = tuple(sorted({int(v) for v in s}))
    if not nodes:
        raise NetworkError("support is empty")
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    members = frozenset(nodes)
    for v in nodes:
        if not 1 <= v <= net.n:
            raise NetworkError(f"node {v} outside 1..{net.n}")

    regular = all(len(net.neighbors(i) & members) == r for i in nodes)
    comps = tuple(components(net, nodes))
    minimal = tuple(regular and len(c) == r + 1 for c in comps)
    outside = [i for i in net.nodes if i not in members]
    outside_ok = all(len(net.neighbors(i) & members) >= r + 1 for i in outside)

    mode = "exact"
    if not regular:
        maximal_ok = False
    else:
        free = [i for i in outside if not (net.neighbors(i) & members)]
        extendable, mode = _has_regular_piece(net, free, r)
        maximal_ok = not extendable
    return RegularSupport(
        nodes=nodes,
        r=r,
        n=net.n,
        regular=regular,
        components=comps,
        minimal=minimal,
        outside_ok=outside_ok,
        maximal_ok=maximal_ok,
        mode=mode,
        maximal_mode=mode,
    )


# -- independent sets -------------------------------------------------------


def find_maximal_independent_set(
    net: Network, order: Sequence[int] | None = None, seed: int | None = None
) -> RegularSupport:
    """Greedy maximal independent set.

    Nodes are scanned in ``order`` (default ascending labels, or a random
    permutation when ``seed`` is given) and kept when no kept node is adjacent.
    """
    if order is None:
        if seed is None:
            order = list(net.nodes)
        else:
            order = [int(v) + 1 for v in np.random.default_rng(seed).permutation(net.n)]
    order = list(order)
    if sorted(order) != list(net.nodes):
        raise NetworkError("order must be a permutation of the nodes")
    chosen: set[int] = set()
    for v in order:
        if not (net.neighbors(v) & chosen):
            chosen.add(v)
    return check_support_conditions(net, chosen, 0)


class MISEnumeration(NamedTuple):
    sets: list[tuple[int, ...]]
    truncated: bool


def enumerate_maximal_independent_sets(net: Network, cap: int = 10000) -> MISEnumeration:
    """All maximal independent sets, via Bron-Kerbosch on the complement.

    Intended for ``n <= 32``. Output is sorted lexicographically; when more
    than ``cap`` sets exist the first ``cap`` found are sorted and returned
    with ``truncated=True``.
    """
    full = (1 << net.n) - 1
    # neighbors in the complement graph
    comp = [full & ~m & ~(1 << i) for i, m in enumerate(net.neighbor_masks)]
    found: list[int] = []
    truncated = False

    def expand(r_mask: int, p_mask: int, x_mask: int) -> bool:
        nonlocal truncated
        if not p_mask and not x_mask:
            if len(found) >= cap:
                truncated = True
                return False
            found.append(r_mask)
            return True
        # pivot with most complement-neighbors in P
        px = p_mask | x_mask
        best, pivot = -1, 0
        while px:
            low = px & -px
            u = low.bit_length() - 1
            c = bin(comp[u] & p_mask).count("1")
            if c > best:
                best, pivot = c, u
            px ^= low
        cand = p_mask & ~comp[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            if not expand(r_mask | low, p_mask & comp[v], x_mask & comp[v]):
                return False
            p_mask &= ~low
            x_mask |= low
            cand ^= low
        return True

    expand(0, full, 0)
    sets = sorted(_unmask(m) for m in found)
    return MISEnumeration(sets, truncated)


# -- r-regular sets ---------------------------------------------------------


def enumerate_r_regular_supports(net: Network, r: int, max_n: int = 16) -> list[RegularSupport]:
    """Every maximal r-regular node set, by exhaustive subset enumeration.

    Exponential in ``n``; refuses when ``n > max_n``. Sorted by size
    (largest first), then lexicographically.
    """
    if net.n > max_n:
        raise ValueError(f"exact enumeration refused: n={net.n} > max_n={max_n}")
    if net.n > kernels.MAX_TABLE_BITS:
        raise ValueError(f"n={net.n} exceeds the bitmask limit {kernels.MAX_TABLE_BITS}")
    n = net.n
    adj = net.neighbor_masks
    reg = kernels.regular_mask_table(adj, n, r)
    has_sub = kernels.subset_closure(reg, n)
    nbr = kernels.neighbor_union_table(adj, n)
    full = np.uint64((1 << n) - 1)
    masks = np.flatnonzero(reg).astype(np.uint64)
    free = full & ~(masks | nbr[masks])
    maximal = masks[has_sub[free.astype(np.int64)] == 0]
    out = [check_support_conditions(net, _unmask(int(m)), r) for m in maximal]
    out.sort(key=lambda s: (-s.k, s.nodes))
    return out


def _grow(net: Network, allowed: Sequence[int], r: int, rng) -> set[int]:
    """Randomized greedy growth keeping every internal degree <= r."""
    chosen: set[int] = set()
    deg: dict[int, int] = {}
    pool = set(allowed)
    while True:
        addable = []
        for v in pool:
            inside = net.neighbors(v) & chosen
            if len(inside) <= r and all(deg[u] < r for u in inside):
                addable.append(v)
        if not addable:
            return chosen
        # prefer nodes that raise deficient members' degrees
        score = {v: sum(1 for u in net.neighbors(v) & chosen if deg[u] < r) for v in addable}
        top = max(score.values())
        if top == 0 and chosen and r > 0:
            # prefer extending an open piece over starting a new one
            open_piece = [v for v in addable if net.neighbors(v) & chosen]
            if open_piece:
                addable = open_piece
        cands = sorted(v for v in addable if score[v] == top)
        v = cands[int(rng.integers(len(cands)))]
        chosen.add(v)
        deg[v] = 0
        for u in net.neighbors(v) & chosen:
            if u != v:
                deg[u] += 1
                deg[v] += 1
        pool.discard(v)


def _repair(net: Network, chosen: set[int], allowed: set[int], r: int, rng, budget: int) -> set[int]:
    """Swap moves (one in, at most one out) that reduce the deficient count."""

    def degree(v: int, s: set[int]) -> int:
        return len(net.neighbors(v) & s)

    def deficit(s: set[int]) -> int:
        return sum(r - degree(v, s) for v in s if degree(v, s) < r)

    current = deficit(chosen)
    for _ in range(budget):
        if current == 0:
            break
        moves = []
        for u in sorted(v for v in chosen if degree(v, chosen) < r):
            for v in sorted((net.neighbors(u) & allowed) - chosen):
                blockers = [w for w in net.neighbors(v) & chosen if degree(w, chosen) >= r]
                if len(blockers) > 1:
                    continue
                trial = (chosen - set(blockers)) | {v}
                if any(degree(w, trial) > r for w in trial):
                    continue
                d = deficit(trial)
                if d < current:
                    moves.append((d, tuple(sorted(trial))))
        if not moves:
            break
        best = min(m[0] for m in moves)
        picks = sorted(m[1] for m in moves if m[0] == best)
        chosen = set(picks[int(rng.integers(len(picks)))])
        current = best
    return chosen


def _prune(net: Network, chosen: set[int], r: int) -> set[int]:
    chosen = set(chosen)
    while True:
        bad = [v for v in chosen if len(net.neighbors(v) & chosen) != r]
        if not bad:
            return chosen
        # drop the most deficient first, lowest label on ties
        v = min(bad, key=lambda u: (len(net.neighbors(u) & chosen) - r, u))
        chosen.discard(v)


def _one_pass(net: Network, allowed: Sequence[int], r: int, rng) -> set[int]:
    allowed_set = set(allowed)
    s = _grow(net, allowed, r, rng)
    s = _repair(net, s, allowed_set, r, rng, budget=2 * len(allowed_set))
    return _prune(net, s, r)


def _heuristic_search(net: Network, r: int, rng, restarts: int) -> set[int] | None:
    best: tuple | None = None
    for _ in range(restarts):
        s = _one_pass(net, list(net.nodes), r, rng)
        if not s:
            continue
        # extend with disjoint pieces on the nodes that have no link into s
        while True:
            free = [v for v in net.nodes if v not in s and not (net.neighbors(v) & s)]
            if not free:
                break
            piece = _one_pass(net, free, r, rng)
            if not piece:
                break
            s |= piece
        key = (-len(s), tuple(sorted(s)))
        if best is None or key < best:
            best = key
    return None if best is None else set(best[1])


def find_maximal_r_regular(
    net: Network, r: int, seed: int = 0, restarts: int = 100
) -> RegularSupport | None:
    """Heuristic search for a large maximal r-regular supporting set.

    Each restart grows a set greedily (internal degrees capped at ``r``),
    repairs deficient nodes by swaps, prunes to exact r-regularity and then
    adds disjoint r-regular pieces from the residual. The largest result
    wins, ties broken lexicographically. Returns ``None`` when nothing was
    found; that is not a proof of non-existence.
    """
    if r < 0:
        raise ValueError(f"r must be >= 0, got {r}")
    rng = np.random.default_rng(seed)
    if r == 0:
        best = None
        orders = [list(net.nodes)] + [
            [int(v) + 1 for v in rng.permutation(net.n)] for _ in range(restarts - 1)
        ]
        for order in orders:
            cand = find_maximal_independent_set(net, order=order)
            if best is None or (-cand.k, cand.nodes) < (-best.k, best.nodes):
                best = cand
        return replace(best, mode="heuristic")
    found = _heuristic_search(net, r, rng, restarts)
    if found is None:
        return None
    support = check_support_conditions(net, found, r)
    return replace(support, mode="heuristic", maximal_mode=support.mode)
