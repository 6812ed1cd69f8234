"""Exact TAP solving and polytope membership, used as ground truth.

Among optimal solutions the tie-break is: fewest links, then the
lexicographically smallest sorted tuple of link ids.  Both the
branch-and-bound and the brute-force route honour it, so they return the
same set, not just the same cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import Infeasible, NotStarShaped, TooLarge, UncoverableEdge, UnknownLink
from .instance import LinkClass, TapInstance, TreeIndex, classify, validate
from .lp import as_index
from .simplex import LpProblem, LpStatus, Row, solve_lp

DEFAULT_LINK_LIMIT = 24


@dataclass(frozen=True)
class Solution:
    link_ids: frozenset[str]
    cost: Fraction

    @classmethod
    def of(cls, inst: TapInstance, link_ids: Iterable[str]) -> Solution:
        ids = frozenset(link_ids)
        return cls(ids, inst.cost_of(ids))

    def sort_key(self) -> tuple:
        return (self.cost, len(self.link_ids), tuple(sorted(self.link_ids)))


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    weights: Mapping[frozenset[str], Fraction] | None = None


class _Masks:
    """Link paths and tree edges as integer bitmasks."""

    def __init__(self, idx: TreeIndex):
        self.idx = idx
        bit = {c: 1 << t for t, (_, c) in enumerate(idx.edges)}
        self.full = (1 << len(idx.edges)) - 1
        self.links = list(idx.instance.links)
        self.ids = [l.id for l in self.links]
        self.costs = [l.cost for l in self.links]
        self.paths = [sum(bit[c] for _, c in idx.link_paths[i]) for i in self.ids]
        self.n_edges = len(idx.edges)
        covered = 0
        for p in self.paths:
            covered |= p
        missing = self.full & ~covered
        if missing:
            t = (missing & -missing).bit_length() - 1
            raise UncoverableEdge(idx.edges[t])

    def covers(self, chosen: Iterable[int]) -> int:
        m = 0
        for i in chosen:
            m |= self.paths[i]
        return m


def is_feasible(inst: TapInstance | TreeIndex, link_ids: Iterable[str]) -> bool:
    """True iff every tree edge is covered by some link in ``link_ids``."""
    idx = as_index(inst)
    covered = set()
    for i in link_ids:
        if i not in idx.instance.link_by_id:
            raise UnknownLink(f"unknown link {i!r}")
        covered |= idx.link_paths[i]
    return len(covered) == len(idx.edges)


def solve_exact(inst: TapInstance | TreeIndex, method: str = "bnb",
                link_limit: int = DEFAULT_LINK_LIMIT) -> Solution:
    """Minimum-cost feasible link set.

    ``method`` is ``"bnb"`` (branch and bound with the exact edge-LP bound) or
    ``"exhaustive"`` (vectorised scan of all ``2**m`` subsets, at most
    ``link_limit`` links).
    """
    idx = as_index(inst)
    try:
        masks = _Masks(idx)
    except UncoverableEdge as exc:
        raise Infeasible(str(exc)) from exc
    if method == "exhaustive":
        if masks.n_edges > 62:
            raise TooLarge(f"{masks.n_edges} tree edges do not fit the 64-bit scan")
        if len(masks.ids) > link_limit:
            raise TooLarge(f"{len(masks.ids)} links exceeds the exhaustive limit {link_limit}")
        chosen = _exhaustive(masks)
    elif method == "bnb":
        chosen = _BranchAndBound(masks).run()
    else:
        raise ValueError(f"unknown method {method!r}")
    return Solution.of(idx.instance, (masks.ids[i] for i in chosen))


def _exhaustive(masks: _Masks) -> list[int]:
    m = len(masks.ids)
    D = math.lcm(1, *(c.denominator for c in masks.costs))
    icost = [int(c * D) for c in masks.costs]
    low = min(m, 18)
    cover = np.zeros(1, dtype=np.int64)
    cost = np.zeros(1, dtype=np.int64)
    for i in range(low):
        cover = np.concatenate([cover, cover | masks.paths[i]])
        cost = np.concatenate([cost, cost + icost[i]])
    size = np.bitwise_count(np.arange(1 << low, dtype=np.int64)).astype(np.int64)
    best = None
    for high in range(1 << (m - low)):
        hi = [low + t for t in range(m - low) if high >> t & 1]
        hcover = masks.covers(hi)
        hcost = sum(icost[i] for i in hi)
        ok = (cover | hcover) == masks.full
        if not ok.any():
            continue
        c = cost[ok] + hcost
        cmin = int(c.min())
        if best is not None and cmin > best[0][0]:
            continue
        lows = np.flatnonzero(ok)[c == cmin]
        for lo in lows[size[lows] == size[lows].min()]:
            chosen = [i for i in range(low) if int(lo) >> i & 1] + hi
            key = (cmin, len(chosen), tuple(sorted(masks.ids[i] for i in chosen)))
            if best is None or key < best[0]:
                best = (key, chosen)
    assert best is not None
    return best[1]


class _BranchAndBound:
    """Branch on the uncovered edge with the fewest remaining links.

    Child ``i`` takes the i-th covering link and forbids the earlier ones, so
    children partition the feasible sets.  Nodes are pruned only when their
    edge-LP bound is strictly above the incumbent cost, which keeps the
    tie-break exact.
    """

    def __init__(self, masks: _Masks):
        self.m = masks
        self.best: tuple | None = None
        self.best_set: list[int] = []
        self.nodes = 0

    def run(self) -> list[int]:
        self._node([], frozenset(), 0)
        return self.best_set

    def _key(self, chosen: list[int]) -> tuple:
        m = self.m
        return (sum((m.costs[i] for i in chosen), Fraction(0)), len(chosen),
                tuple(sorted(m.ids[i] for i in chosen)))

    def _node(self, chosen: list[int], banned: frozenset[int], covered: int) -> None:
        m = self.m
        self.nodes += 1
        chosen = list(chosen)
        # unit propagation: an edge with one remaining link forces it
        while True:
            open_edges = m.full & ~covered
            if not open_edges:
                break
            free = [i for i in range(len(m.ids)) if i not in banned and i not in chosen]
            forced = None
            for_edge: dict[int, list[int]] = {}
            e = open_edges
            while e:
                b = e & -e
                e ^= b
                opts = [i for i in free if m.paths[i] & b]
                if not opts:
                    return
                if len(opts) == 1:
                    forced = opts[0]
                    break
                for_edge[b] = opts
            if forced is None:
                break
            chosen.append(forced)
            covered |= m.paths[forced]

        base = sum((m.costs[i] for i in chosen), Fraction(0))
        if self.best is not None and base > self.best[0]:
            return
        if covered == m.full:
            key = self._key(chosen)
            if self.best is None or key < self.best:
                self.best, self.best_set = key, chosen
            return

        lp = self._bound(free, open_edges)
        if self.best is not None and base + lp.objective_value > self.best[0]:
            return
        b = min(for_edge, key=lambda b: (len(for_edge[b]), b))
        opts = sorted(for_edge[b], key=lambda i: (-lp.values[m.ids[i]], i))
        ban = set(banned)
        for i in opts:
            self._node(chosen + [i], frozenset(ban), covered | m.paths[i])
            ban.add(i)

    def _bound(self, free: list[int], open_edges: int):
        m = self.m
        rows = []
        e = open_edges
        while e:
            b = e & -e
            e ^= b
            rows.append(Row({m.ids[i]: 1 for i in free if m.paths[i] & b}, 1))
        prob = LpProblem(tuple(m.ids[i] for i in free), {m.ids[i]: m.costs[i] for i in free}, rows)
        sol = solve_lp(prob)
        assert sol.status is LpStatus.OPTIMAL
        return sol


def solve_star_exact(star) -> Solution:
    """Exact solve of a star-shaped instance (only cross/up links w.r.t. its root).

    Accepts a :class:`TapInstance` rooted at the center, or any object with an
    ``as_instance()`` method returning one.
    """
    inst = star.as_instance() if hasattr(star, "as_instance") else star
    idx = validate(inst)
    for link in inst.links:
        cls = classify(idx, link, inst.root)
        if cls is LinkClass.IN:
            raise NotStarShaped(f"link {link.id!r} ({link.u}, {link.v}) is an in-link "
                                f"for center {inst.root!r}")
    return solve_exact(idx)


def enumerate_minimal_solutions(inst: TapInstance | TreeIndex,
                                link_limit: int = DEFAULT_LINK_LIMIT) -> list[Solution]:
    """All inclusion-minimal feasible link sets, cheapest first."""
    idx = as_index(inst)
    if len(idx.instance.links) > link_limit:
        raise TooLarge(f"{len(idx.instance.links)} links exceeds the limit {link_limit}")
    try:
        m = _Masks(idx)
    except UncoverableEdge:
        return []
    found: list[list[int]] = []

    def walk(chosen: list[int], banned: set[int], covered: int) -> None:
        open_edges = m.full & ~covered
        if not open_edges:
            found.append(chosen)
            return
        b = open_edges & -open_edges
        ban = set(banned)
        for i in range(len(m.ids)):
            if m.paths[i] & b and i not in ban:
                walk(chosen + [i], set(ban), covered | m.paths[i])
                ban.add(i)

    walk([], set(), 0)
    out = []
    for chosen in found:
        if all(m.covers(j for j in chosen if j != i) != m.full for i in chosen):
            out.append(Solution.of(idx.instance, (m.ids[i] for i in chosen)))
    return sorted(out, key=Solution.sort_key)


def tap_polytope_membership(inst: TapInstance | TreeIndex, point: Mapping[str, Fraction],
                            support_limit: int = 16, dominant: bool = False) -> MembershipResult:
    """Decide whether ``point`` is a convex combination of feasible incidence vectors.

    Columns are all feasible subsets of the point's support.  By default
    membership is exact coordinate equality, so dominated points are not
    accepted; with ``dominant=True`` the test is ``point >= combination``
    instead (membership in the up-closure).
    """
    idx = as_index(inst)
    known = idx.instance.link_by_id
    for k in point:
        if k not in known:
            raise UnknownLink(f"point names unknown link {k!r}")
    x = {i: Fraction(point.get(i, 0)) for i in known}
    if any(v < 0 for v in x.values()) or (not dominant and any(v > 1 for v in x.values())):
        return MembershipResult(False)
    support = [i for i in known if x[i] > 0]
    if len(support) > support_limit:
        raise TooLarge(f"support of size {len(support)} exceeds the limit {support_limit}")
    try:
        m = _Masks(idx)
    except UncoverableEdge:
        return MembershipResult(False)
    pos = {i: t for t, i in enumerate(m.ids)}
    sup_paths = [m.paths[pos[i]] for i in support]
    columns: list[frozenset[str]] = []
    for mask in range(1 << len(support)):
        cover = 0
        for t, p in enumerate(sup_paths):
            if mask >> t & 1:
                cover |= p
        if cover == m.full:
            columns.append(frozenset(support[t] for t in range(len(support)) if mask >> t & 1))
    if not columns:
        return MembershipResult(False)
    names = tuple(f"B{j}" for j in range(len(columns)))
    rows = []
    for i in support:
        coeffs = {names[j]: 1 for j, B in enumerate(columns) if i in B}
        if not dominant:
            rows.append(Row(coeffs, x[i]))
        rows.append(Row({k: -1 for k in coeffs}, -x[i]))
    rows.append(Row({n: 1 for n in names}, 1))
    rows.append(Row({n: -1 for n in names}, -1))
    sol = solve_lp(LpProblem(names, {}, rows))
    if sol.status is not LpStatus.OPTIMAL:
        return MembershipResult(False)
    weights = {columns[j]: sol.values[n] for j, n in enumerate(names) if sol.values[n] > 0}
    return MembershipResult(True, weights)
