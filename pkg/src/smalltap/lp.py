"""Covering relaxations of TAP: the edge LP and the odd-cut LP.

An odd cut is a vertex set ``S`` whose tree boundary ``F`` has odd size.
Because T spans V, ``S`` (up to complement) is determined by ``F``: a vertex
is in ``S`` iff its root path crosses ``F`` an odd number of times.  A link
then crosses the cut iff its tree path meets ``F`` an odd number of times,
so the odd-cut row for ``F`` has coefficient ``2 * ceil(|P(l) & F| / 2)`` on
link ``l``.  Separation enumerates the ``2**(|E|-1)`` odd edge subsets as
bitmasks with numpy.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import EvenBoundary, NotFeasible, TooLarge, UncoverableEdge, UnknownLink
from .instance import Edge, TapInstance, TreeIndex, cov, validate
from .simplex import LpProblem, LpSolution, LpStatus, Row, solve_lp

DEFAULT_SUBSET_LIMIT = 22


def subset_limit() -> int:
    """Vertex limit for exhaustive cut enumeration (env ``TAP_SUBSET_LIMIT``)."""
    raw = os.environ.get("TAP_SUBSET_LIMIT")
    return int(raw) if raw else DEFAULT_SUBSET_LIMIT


def as_index(inst: TapInstance | TreeIndex) -> TreeIndex:
    return inst if isinstance(inst, TreeIndex) else validate(inst)


@dataclass(frozen=True)
class OddCut:
    S: frozenset[str]
    tree_boundary: frozenset[Edge]
    link_boundary: frozenset[str]

    @property
    def size(self) -> int:
        return len(self.tree_boundary)


def odd_cut(inst: TapInstance | TreeIndex, S) -> OddCut:
    """Build the canonical cut for ``S`` (the side without the root)."""
    idx = as_index(inst)
    S = frozenset(S)
    if idx.root in S:
        S = frozenset(idx.instance.vertices) - S
    tree_b = frozenset(e for e in idx.edges if (e[0] in S) != (e[1] in S))
    if len(tree_b) % 2 == 0:
        raise EvenBoundary(f"|delta(S) & E(T)| = {len(tree_b)} is even for S = {sorted(S)}")
    link_b = frozenset(l.id for l in idx.instance.links if (l.u in S) != (l.v in S))
    return OddCut(S, tree_b, link_b)


def odd_constraint(inst: TapInstance | TreeIndex, cut: OddCut) -> Row:
    """The odd-cut row ``x(delta(S) & L) + sum_e x(cov(e)) >= |F| + 1``."""
    idx = as_index(inst)
    if len(cut.tree_boundary) % 2 == 0:
        raise EvenBoundary(f"tree boundary of size {len(cut.tree_boundary)} is even")
    coeffs: dict[str, int] = {}
    for link_id in cut.link_boundary:
        coeffs[link_id] = coeffs.get(link_id, 0) + 1
    for e in cut.tree_boundary:
        for link_id in cov(idx, e):
            coeffs[link_id] = coeffs.get(link_id, 0) + 1
    odd = [k for k, a in coeffs.items() if a % 2]
    assert not odd, f"odd coefficients on {odd}"
    label = "odd{" + ",".join(sorted(cut.S)) + "}"
    return Row(coeffs, len(cut.tree_boundary) + 1, label)


def build_edge_lp(inst: TapInstance | TreeIndex) -> LpProblem:
    """One covering row ``x(cov(e)) >= 1`` per tree edge."""
    idx = as_index(inst)
    rows = []
    for e in idx.edges:
        links = cov(idx, e)
        if not links:
            raise UncoverableEdge(e)
        rows.append(Row({i: 1 for i in links}, 1, f"edge {e[0]}-{e[1]}"))
    links = idx.instance.links
    return LpProblem(tuple(l.id for l in links), {l.id: l.cost for l in links}, tuple(rows))


def solve_edge_lp(inst: TapInstance | TreeIndex) -> LpSolution:
    return solve_lp(build_edge_lp(inst))


class _CutTable:
    """Bitmask view of a tree for exhaustive odd-cut enumeration."""

    def __init__(self, idx: TreeIndex, limit: int | None):
        limit = subset_limit() if limit is None else limit
        n = len(idx.instance.vertices)
        if n > limit:
            raise TooLarge(f"{n} vertices exceeds the subset limit {limit}")
        self.idx = idx
        self.edges = idx.edges
        bit = {e[1]: 1 << t for t, e in enumerate(self.edges)}  # child -> edge bit
        self.link_ids = [l.id for l in idx.instance.links]
        self.paths = [sum(bit[c] for _, c in idx.link_paths[i]) for i in self.link_ids]
        self.root_paths = {}
        for v in idx.subtree(idx.root):
            self.root_paths[v] = 0 if v == idx.root else self.root_paths[idx.parent[v]] | bit[v]
        F = np.arange(1, 1 << len(self.edges), dtype=np.int64)
        sizes = np.bitwise_count(F)
        odd = (sizes & 1).astype(bool)
        self.F = F[odd]
        self.sizes = sizes[odd].astype(np.int64)
        # coefficient of each link in each odd row, before scaling
        self.coef = [2 * ((np.bitwise_count(self.F & p).astype(np.int64) + 1) // 2)
                     for p in self.paths]

    def slacks(self, x: Mapping[str, Fraction]) -> tuple[np.ndarray, int]:
        """Row activity minus rhs for every odd cut, scaled by a common denominator."""
        vals = [Fraction(x.get(i, 0)) for i in self.link_ids]
        D = math.lcm(1, *(v.denominator for v in vals))
        ints = [v.numerator * (D // v.denominator) for v in vals]
        bound = (sum(abs(a) for a in ints) * 2 * len(self.edges) + D * (len(self.edges) + 1))
        dtype = np.int64 if bound < 2**62 else object
        total = -(self.sizes.astype(dtype) + 1) * D
        for c, a in zip(self.coef, ints):
            if a:
                total = total + c.astype(dtype) * a
        return total, D

    def cut_for(self, pos: int) -> OddCut:
        F = int(self.F[pos])
        S = frozenset(v for v, m in self.root_paths.items() if bin(F & m).count("1") % 2)
        return odd_cut(self.idx, S)


def separate_odd(inst: TapInstance | TreeIndex, x: Mapping[str, Fraction],
                 limit: int | None = None) -> OddCut | None:
    """Most violated odd cut under ``x``, or None if every odd row holds.

    Ties go to the lexicographically smallest sorted ``S``.
    """
    table = _CutTable(as_index(inst), limit)
    slack, _ = table.slacks(x)
    worst = slack.min()
    if worst >= 0:
        return None
    hits = np.flatnonzero(slack == worst)
    cuts = [table.cut_for(int(p)) for p in hits]
    return min(cuts, key=lambda c: sorted(c.S))


@dataclass(frozen=True)
class OddLpResult:
    solution: LpSolution
    cuts: tuple[OddCut, ...]
    rounds: int

    @property
    def value(self) -> Fraction:
        return self.solution.objective_value


def solve_odd_lp(inst: TapInstance | TreeIndex, limit: int | None = None,
                 max_rounds: int = 10_000) -> OddLpResult:
    """Cutting-plane solve of the odd-cut LP, starting from the edge LP.

    The loop ends when a full separation pass finds nothing, so the returned
    point satisfies every odd-cut row.
    """
    idx = as_index(inst)
    problem = build_edge_lp(idx)
    table = _CutTable(idx, limit)
    seen = {row.key() for row in problem.rows}
    cuts: list[OddCut] = []
    for rounds in range(1, max_rounds + 1):
        sol = solve_lp(problem)
        if sol.status is not LpStatus.OPTIMAL:
            return OddLpResult(sol, tuple(cuts), rounds)
        slack, _ = table.slacks(sol.values)
        worst = slack.min()
        if worst >= 0:
            return OddLpResult(sol, tuple(cuts), rounds)
        hits = np.flatnonzero(slack == worst)
        cut = min((table.cut_for(int(p)) for p in hits), key=lambda c: sorted(c.S))
        row = odd_constraint(idx, cut)
        if row.key() in seen:
            raise RuntimeError(f"separated cut {row.label} is already in the LP")
        seen.add(row.key())
        cuts.append(cut)
        problem = problem.with_rows([row])
    raise RuntimeError(f"cutting-plane loop did not converge in {max_rounds} rounds")


def _point(idx: TreeIndex, point: Mapping[str, Fraction]) -> dict[str, Fraction]:
    known = idx.instance.link_by_id
    for k in point:
        if k not in known:
            raise UnknownLink(f"point names unknown link {k!r}")
    return {i: Fraction(point.get(i, 0)) for i in known}


def check_point_odd_feasible(inst: TapInstance | TreeIndex, point: Mapping[str, Fraction],
                             limit: int | None = None) -> bool | OddCut:
    """True if ``point`` satisfies all odd-cut LP rows, else the most violated cut.

    Edge rows are the singleton-boundary odd cuts, so they are covered by the
    same enumeration.  Negative coordinates raise :class:`NotFeasible`.
    """
    idx = as_index(inst)
    x = _point(idx, point)
    neg = sorted(i for i, v in x.items() if v < 0)
    if neg:
        raise NotFeasible(f"negative coordinates on {neg}")
    cut = separate_odd(idx, x, limit)
    return True if cut is None else cut


def _rank(rows: list[list[Fraction]], n: int) -> int:
    """Rank over Q by incremental elimination; stops early at ``n``."""
    pivots: dict[int, list[Fraction]] = {}
    for row in rows:
        row = list(row)
        for c, prow in pivots.items():
            if row[c]:
                f = row[c]
                row = [a - f * b for a, b in zip(row, prow)]
        lead = next((c for c, a in enumerate(row) if a), None)
        if lead is None:
            continue
        inv = 1 / row[lead]
        row = [a * inv for a in row]
        for c, prow in pivots.items():
            if prow[lead]:
                f = prow[lead]
                pivots[c] = [a - f * b for a, b in zip(prow, row)]
        pivots[lead] = row
        if len(pivots) == n:
            break
    return len(pivots)


def tight_rank(inst: TapInstance | TreeIndex, point: Mapping[str, Fraction],
               limit: int | None = None) -> int:
    """Rank of the constraints (bounds and odd-cut rows) tight at ``point``."""
    idx = as_index(inst)
    x = _point(idx, point)
    table = _CutTable(idx, limit)
    slack, _ = table.slacks(x)
    if any(v < 0 for v in x.values()) or (slack < 0).any():
        raise NotFeasible("point violates the odd-cut LP")
    ids = table.link_ids
    rows = [[Fraction(int(i == j)) for j in range(len(ids))]
            for i in range(len(ids)) if x[ids[i]] == 0]
    for p in np.flatnonzero(slack == 0):
        rows.append([Fraction(int(c[p])) for c in table.coef])
    return _rank(rows, len(ids))


def is_extreme_point(inst: TapInstance | TreeIndex, point: Mapping[str, Fraction],
                     limit: int | None = None) -> bool:
    """True iff the tight constraints at a feasible ``point`` have full rank."""
    idx = as_index(inst)
    return tight_rank(idx, point, limit) == len(idx.instance.links)
