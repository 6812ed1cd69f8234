"""Level decomposition into star-shaped instances.

For a leaf-to-leaf instance with internal levels ``1..k`` the level-``l``
candidate splits the tree into stars and solves each exactly:

* ``l = 1``: one star centred at the root holding every tree edge.
* ``l >= 2``: one star per internal node ``v`` at level ``l`` (the subtree
  of ``v`` plus the edge to its parent, centred at ``v``) and a residual star
  centred at the root holding every other edge.

Each link is replaced by copies of the same cost whose tree paths partition
its own path and each fit inside one star as a cross- or up-link there.  A
link with lca ``c`` at level ``q`` gets:

==============  ==============================================  ======
q               copies                                          count
==============  ==============================================  ======
``q == l``      the link itself (cross at ``c``)                1
``q > l``       ``(a, c), (c, b)`` (up-links)                   2
``q == l-1``    ``(a, c), (c, b)``, or ``(a, b)`` when          <= 2
                ``c`` is the root and both ends are residual
``q < l-1``     ``(a, u_a), (u_a, c), (c, u_b), (u_b, b)``;     <= 3
                the middle pair merges into ``(u_a, u_b)``      or 4
                when ``c`` is the root
==============  ==============================================  ======

``u_a`` is the level-``(l-1)`` ancestor of ``a``; it "exists" only when ``a``
lies inside some level-``l`` star, otherwise ``a`` itself stands in.  The
counts are the coefficients of :func:`candidate_cost_bound`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import LevelOutOfRange, NotLeafToLeaf
from .exact import is_feasible, solve_star_exact
from .instance import (
    Edge,
    Link,
    LinkClass,
    TapInstance,
    TreeIndex,
    classify,
    covered_edges,
    is_leaf_to_leaf,
    lca,
    leaf_to_leaf,
    validate,
)
from .lp import as_index


@dataclass(frozen=True)
class TransformedLink:
    id: str
    u: str
    v: str
    cost: Fraction
    origin: str

    @property
    def ends(self) -> tuple[str, str]:
        return (self.u, self.v)


@dataclass(frozen=True)
class StarInstance:
    center: str
    tree_edges: tuple[Edge, ...]  # (parent, child) in the full tree
    links: tuple[TransformedLink, ...]

    @property
    def vertices(self) -> frozenset[str]:
        return frozenset(v for e in self.tree_edges for v in e)

    def as_instance(self) -> TapInstance:
        links = tuple(Link(t.id, t.u, t.v, t.cost) for t in self.links)
        return TapInstance(self.vertices, self.center, self.tree_edges, links,
                           f"star@{self.center}")

    def summary(self) -> dict:
        return {"center": self.center, "edges": len(self.tree_edges), "links": len(self.links)}


@dataclass(frozen=True)
class Candidate:
    level: int
    link_ids: frozenset[str]
    cost: Fraction
    per_star: tuple[tuple[StarInstance, tuple[TransformedLink, ...]], ...] = ()


@dataclass(frozen=True)
class ApproxResult:
    best: Candidate
    all_costs: dict[int, Fraction]
    ratio_bound: Fraction
    k: int
    candidates: tuple[Candidate, ...] = ()


def ratio_bound(k: int) -> Fraction:
    """Guaranteed ratio ``2 - 1/2**(k-1)`` for a k-level tree."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return 2 - Fraction(1, 2 ** (k - 1))


def copy_coefficient(q: int, l: int) -> int:
    """Copies charged to a link with lca level ``q`` in the level-``l`` candidate."""
    if l == 1:
        return 1 if q == 1 else 2
    if q == l:
        return 1
    if q > l or q == l - 1:
        return 2
    return 3 if q == 1 else 4


def candidate_cost_bound(l: int, costs: Sequence[Fraction]) -> Fraction:
    """Upper bound ``C_l`` on candidate ``l`` given per-level costs ``c_1..c_k``."""
    k = len(costs)
    if not 1 <= l <= k:
        raise LevelOutOfRange(f"level {l} outside 1..{k}")
    return sum((copy_coefficient(q, l) * Fraction(c) for q, c in enumerate(costs, 1)), Fraction(0))


def worst_case_costs(k: int) -> list[Fraction]:
    """Per-level costs making all ``C_l`` equal: ``1, 1, 2, 4, ..., 2**(k-2)``.

    Built from ``c_1 = c_2``, ``c_3 = 2 c_1`` and ``c_{l+1} = 2 c_{l-1} + c_l``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    c = [Fraction(1)]
    if k >= 2:
        c.append(c[0])
    if k >= 3:
        c.append(2 * c[0])
    while len(c) < k:
        c.append(2 * c[-2] + c[-1])
    return c


def _level_index(inst: TapInstance | TreeIndex, l: int) -> TreeIndex:
    idx = as_index(inst)
    if not is_leaf_to_leaf(idx):
        raise NotLeafToLeaf("apply leaf_to_leaf first: some link ends at an internal node")
    if not 1 <= l <= idx.k:
        raise LevelOutOfRange(f"level {l} outside 1..{idx.k}")
    return idx


def _star_center(idx: TreeIndex, l: int, child: str) -> str:
    """Center of the level-``l`` star owning the tree edge above ``child``."""
    if l > 1 and idx.level[child] >= l:
        v = idx.ancestor_at_level(child, l)
        if not idx.is_leaf(v):
            return v
    return idx.root


def _pieces(idx: TreeIndex, a: str, b: str, l: int) -> list[tuple[str, str]]:
    c = lca(idx, a, b)
    q = idx.level[c]
    if l == 1:
        return [(a, b)] if q == 1 else [(a, c), (c, b)]
    if q == l:
        return [(a, b)]
    if q > l:
        return [(a, c), (c, b)]

    def exit_point(x):
        # where x's path leaves its level-l star, or x if it is already outside
        return idx.ancestor_at_level(x, l - 1) if idx.level[x] > l else x

    xa, xb = exit_point(a), exit_point(b)
    out = []
    if xa != a:
        out.append((a, xa))
    if xa == c and xb == c:
        pass
    elif xa == c:
        out.append((c, xb))
    elif xb == c:
        out.append((xa, c))
    elif q == 1:
        out.append((xa, xb))
    else:
        out += [(xa, c), (c, xb)]
    if xb != b:
        out.append((xb, b))
    return out


def transform_link(idx: TreeIndex, link: Link, l: int) -> list[TransformedLink]:
    """Copies of ``link`` for the level-``l`` candidate (see module docstring)."""
    return [TransformedLink(f"{link.id}@{j}", u, v, link.cost, link.id)
            for j, (u, v) in enumerate(_pieces(idx, link.u, link.v, l))]


def build_level_candidate(inst: TapInstance | TreeIndex, l: int) -> list[StarInstance]:
    """Star-shaped subinstances of the level-``l`` candidate.

    The input must be leaf-to-leaf.  Stars come out root-residual first, then
    level-``l`` centers in BFS order; stars with no tree edge are omitted.
    """
    idx = _level_index(inst, l)
    owner = {e: _star_center(idx, l, e[1]) for e in idx.edges}
    centers = [idx.root] + [v for v in idx.internal_nodes if l > 1 and idx.level[v] == l]
    edges: dict[str, list[Edge]] = {c: [] for c in centers}
    for e in idx.edges:
        edges[owner[e]].append(e)
    links: dict[str, list[TransformedLink]] = {c: [] for c in centers}
    for link in idx.instance.links:
        for t in transform_link(idx, link, l):
            homes = {owner[e] for e in covered_edges(idx, t.ends)}
            if len(homes) != 1:
                raise AssertionError(f"copy {t.id} spans stars {sorted(homes)}")
            links[homes.pop()].append(t)
    return [StarInstance(c, tuple(edges[c]), tuple(links[c])) for c in centers if edges[c]]


def check_star(star: StarInstance) -> None:
    """Raise AssertionError unless every link is cross or up at the center."""
    sidx = validate(star.as_instance())
    for t in star.links:
        if classify(sidx, t.ends, star.center) is LinkClass.IN:
            raise AssertionError(f"{t.id} is an in-link of star {star.center}")


def solve_level_candidate(inst: TapInstance | TreeIndex, l: int) -> Candidate:
    """Solve every star of level ``l`` exactly and map copies back to originals."""
    idx = _level_index(inst, l)
    per_star = []
    chosen: set[str] = set()
    for star in build_level_candidate(idx, l):
        sol = solve_star_exact(star)
        picked = tuple(t for t in star.links if t.id in sol.link_ids)
        per_star.append((star, picked))
        chosen.update(t.origin for t in picked)
    if not is_feasible(idx, chosen):
        raise AssertionError(f"level-{l} candidate does not cover the tree")
    return Candidate(l, frozenset(chosen), idx.instance.cost_of(chosen), tuple(per_star))


def _solve_level(args):
    reduced, l = args
    return solve_level_candidate(reduced, l)


def approximate(inst: TapInstance, n_jobs: int | None = None) -> ApproxResult:
    """Best of the ``k`` level candidates, within ``2 - 1/2**(k-1)`` of optimal.

    ``n_jobs > 1`` solves the levels in worker processes; the result is the
    same either way.
    """
    validate(inst)
    reduced, mapping = leaf_to_leaf(inst)
    idx = validate(reduced)
    levels = range(1, idx.k + 1)
    if n_jobs is not None and n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            raw = list(pool.map(_solve_level, [(reduced, l) for l in levels]))
    else:
        raw = [solve_level_candidate(idx, l) for l in levels]
    candidates = []
    for cand in raw:
        ids = mapping.backward(cand.link_ids)
        candidates.append(Candidate(cand.level, ids, inst.cost_of(ids), cand.per_star))
    best = min(candidates, key=lambda c: (c.cost, c.level))
    return ApproxResult(best, {c.level: c.cost for c in candidates}, ratio_bound(idx.k),
                        idx.k, tuple(candidates))
