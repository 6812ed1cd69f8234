"""TAP instances: a rooted spanning tree plus a list of weighted links.

Levels are 1-based (the root sits at level 1) and a tree edge is written as
the ordered pair ``(parent, child)``; the child alone identifies the edge.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

from .errors import (
    CycleDetected,
    DisconnectedTree,
    DuplicateLinkId,
    EmptyTree,
    NegativeCost,
    SelfLoopLink,
    UnknownEdge,
    UnknownLink,
    UnknownVertex,
)

Edge = tuple[str, str]


@dataclass(frozen=True)
class Link:
    id: str
    u: str
    v: str
    cost: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "cost", Fraction(self.cost))

    @property
    def ends(self) -> tuple[str, str]:
        return (self.u, self.v)


@dataclass(frozen=True)
class TapInstance:
    vertices: frozenset[str]
    root: str
    tree_edges: tuple[Edge, ...]
    links: tuple[Link, ...] = ()
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "tree_edges", tuple(tuple(e) for e in self.tree_edges))
        object.__setattr__(self, "links", tuple(self.links))

    @cached_property
    def link_by_id(self) -> dict[str, Link]:
        return {link.id: link for link in self.links}

    def link(self, link_id: str) -> Link:
        try:
            return self.link_by_id[link_id]
        except KeyError:
            raise UnknownLink(f"unknown link {link_id!r}") from None

    def cost_of(self, link_ids: Iterable[str]) -> Fraction:
        return sum((self.link(i).cost for i in link_ids), Fraction(0))

    def with_links(self, links: Iterable[Link], name: str | None = None) -> TapInstance:
        return TapInstance(self.vertices, self.root, self.tree_edges, tuple(links),
                           self.name if name is None else name)


class LinkClass(enum.Enum):
    CROSS = "cross"
    UP = "up"
    IN = "in"


@dataclass(frozen=True, eq=False)
class TreeIndex:
    """Rooted view of a validated instance.

    Built by :func:`validate`; do not construct directly.
    """

    instance: TapInstance
    parent: Mapping[str, str]
    level: Mapping[str, int]
    children: Mapping[str, tuple[str, ...]]
    k: int

    @property
    def root(self) -> str:
        return self.instance.root

    def is_leaf(self, v: str) -> bool:
        return not self.children[v]

    @cached_property
    def leaves(self) -> frozenset[str]:
        return frozenset(v for v, ch in self.children.items() if not ch)

    @cached_property
    def internal_nodes(self) -> tuple[str, ...]:
        # BFS order, so parents precede children
        order = [self.root]
        for v in order:
            order.extend(self.children[v])
        return tuple(v for v in order if self.children[v])

    @cached_property
    def edges(self) -> tuple[Edge, ...]:
        """All tree edges as (parent, child), in BFS order of the child."""
        order = [self.root]
        for v in order:
            order.extend(self.children[v])
        return tuple((self.parent[v], v) for v in order[1:])

    def edge(self, u: str, v: str) -> Edge:
        """Orient the tree edge {u, v} as (parent, child)."""
        for x in (u, v):
            if x not in self.level:
                raise UnknownVertex(f"unknown vertex {x!r}")
        if u != self.root and self.parent[u] == v:
            return (v, u)
        if v != self.root and self.parent[v] == u:
            return (u, v)
        raise UnknownEdge(f"{u!r}-{v!r} is not a tree edge")

    @cached_property
    def link_paths(self) -> dict[str, frozenset[Edge]]:
        return {link.id: covered_edges(self, link) for link in self.instance.links}

    @cached_property
    def _cov(self) -> dict[Edge, frozenset[str]]:
        acc: dict[Edge, set[str]] = {e: set() for e in self.edges}
        for link_id, path in self.link_paths.items():
            for e in path:
                acc[e].add(link_id)
        return {e: frozenset(s) for e, s in acc.items()}

    def ancestor_at_level(self, v: str, lvl: int) -> str:
        if lvl > self.level[v] or lvl < 1:
            raise ValueError(f"{v!r} has no ancestor at level {lvl}")
        while self.level[v] > lvl:
            v = self.parent[v]
        return v

    def subtree(self, v: str) -> list[str]:
        out = [v]
        for x in out:
            out.extend(self.children[x])
        return out


def validate(inst: TapInstance) -> TreeIndex:
    """Check every instance invariant and return the rooted index."""
    vertices = inst.vertices
    if inst.root not in vertices:
        raise UnknownVertex(f"root {inst.root!r} is not a vertex")
    if len(vertices) < 2:
        raise EmptyTree("the tree needs at least one edge")

    # union-find over the tree edges
    comp = {v: v for v in vertices}

    def find(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    adj: dict[str, list[str]] = {v: [] for v in vertices}
    for u, v in inst.tree_edges:
        for x in (u, v):
            if x not in vertices:
                raise UnknownVertex(f"tree edge ({u!r}, {v!r}) uses unknown vertex {x!r}")
        if u == v:
            raise CycleDetected(f"tree edge ({u!r}, {v!r}) is a loop")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise CycleDetected(f"tree edge ({u!r}, {v!r}) closes a cycle")
        comp[ru] = rv
        adj[u].append(v)
        adj[v].append(u)
    roots = {find(v) for v in vertices}
    if len(roots) > 1:
        stray = sorted(v for v in vertices if find(v) != find(inst.root))
        raise DisconnectedTree(f"vertices not connected to the root: {stray}")

    seen_ids = set()
    for link in inst.links:
        if link.id in seen_ids:
            raise DuplicateLinkId(f"link id {link.id!r} is used twice")
        seen_ids.add(link.id)
        for x in link.ends:
            if x not in vertices:
                raise UnknownVertex(f"link {link.id!r} uses unknown vertex {x!r}")
        if link.u == link.v:
            raise SelfLoopLink(f"link {link.id!r} has both ends at {link.u!r}")
        if link.cost < 0:
            raise NegativeCost(f"link {link.id!r} has negative cost {link.cost}")

    parent = {inst.root: inst.root}
    level = {inst.root: 1}
    children: dict[str, list[str]] = {v: [] for v in vertices}
    order = [inst.root]
    for x in order:
        for y in adj[x]:
            if y not in level:
                parent[y] = x
                level[y] = level[x] + 1
                children[x].append(y)
                order.append(y)
    k = max(level[v] for v in vertices if children[v])
    return TreeIndex(inst, parent, level, {v: tuple(ch) for v, ch in children.items()}, k)


def _check_vertex(idx: TreeIndex, *vs: str) -> None:
    for v in vs:
        if v not in idx.level:
            raise UnknownVertex(f"unknown vertex {v!r}")


def lca(idx: TreeIndex, u: str, v: str) -> str:
    _check_vertex(idx, u, v)
    level, parent = idx.level, idx.parent
    while level[u] > level[v]:
        u = parent[u]
    while level[v] > level[u]:
        v = parent[v]
    while u != v:
        u, v = parent[u], parent[v]
    return u


def path_vertices(idx: TreeIndex, u: str, v: str) -> list[str]:
    """Vertices on the tree path from u to v, endpoints included."""
    c = lca(idx, u, v)
    up = [u]
    while up[-1] != c:
        up.append(idx.parent[up[-1]])
    down = [v]
    while down[-1] != c:
        down.append(idx.parent[down[-1]])
    return up + down[-2::-1]


def covered_edges(idx: TreeIndex, link: Link | tuple[str, str]) -> frozenset[Edge]:
    """Tree edges on the path between the link's endpoints."""
    u, v = link.ends if isinstance(link, Link) else link
    c = lca(idx, u, v)
    out = []
    for x in (u, v):
        while x != c:
            p = idx.parent[x]
            out.append((p, x))
            x = p
    return frozenset(out)


def cov(idx: TreeIndex, e: tuple[str, str]) -> frozenset[str]:
    """Ids of the links covering tree edge ``e`` (either orientation)."""
    return idx._cov[idx.edge(*e)]


def classify(idx: TreeIndex, link: Link | tuple[str, str], center: str) -> LinkClass:
    """Class of a link relative to ``center``, with the tree re-rooted there."""
    u, v = link.ends if isinstance(link, Link) else link
    _check_vertex(idx, center)
    path = path_vertices(idx, u, v)
    if center in path[1:-1]:
        return LinkClass.CROSS
    if center in (u, v):
        return LinkClass.UP
    # rooted at center, x is an ancestor of y iff x lies on the y--center path
    if u in path_vertices(idx, v, center) or v in path_vertices(idx, u, center):
        return LinkClass.UP
    return LinkClass.IN


def is_leaf_to_leaf(idx: TreeIndex) -> bool:
    return all(idx.is_leaf(link.u) and idx.is_leaf(link.v) for link in idx.instance.links)


def partition_by_lca_level(idx: TreeIndex, links: Iterable[Link] | None = None) -> list[list[Link]]:
    """Split links into ``L_1 .. L_k`` by the level of their lca.

    The lca of two distinct vertices is always an internal node, so every
    link lands in one of the ``k`` classes.
    """
    links = idx.instance.links if links is None else links
    parts: list[list[Link]] = [[] for _ in range(idx.k)]
    for link in links:
        parts[idx.level[lca(idx, link.u, link.v)] - 1].append(link)
    return parts


@dataclass(frozen=True)
class LinkMapping:
    """Cost-preserving correspondence between solutions of an instance and
    its leaf-to-leaf reduction.

    Original links keep their ids in the reduced instance; the zero-cost
    helper links are the only additions.
    """

    original_ids: frozenset[str]
    helper_ids: frozenset[str]
    moved_endpoints: Mapping[str, str] = field(default_factory=dict)

    def forward(self, link_ids: Iterable[str]) -> frozenset[str]:
        return frozenset(link_ids) | self.helper_ids

    def backward(self, link_ids: Iterable[str]) -> frozenset[str]:
        return frozenset(link_ids) - self.helper_ids


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def leaf_to_leaf(inst: TapInstance) -> tuple[TapInstance, LinkMapping]:
    """Reduce to an instance whose links all join two leaves.

    Each internal node ``u`` gains leaf children ``u__p1`` and ``u__p2`` and a
    zero-cost helper link between them; link endpoints at ``u`` move to
    ``u__p1``.
    """
    idx = validate(inst)
    taken_v = set(inst.vertices)
    taken_l = {link.id for link in inst.links}
    vertices = set(inst.vertices)
    edges = list(idx.edges)
    moved: dict[str, str] = {}
    helpers: list[Link] = []
    for u in idx.internal_nodes:
        p1 = _fresh(f"{u}__p1", taken_v)
        p2 = _fresh(f"{u}__p2", taken_v)
        vertices.update((p1, p2))
        edges += [(u, p1), (u, p2)]
        moved[u] = p1
        helpers.append(Link(_fresh(f"{u}__h", taken_l), p1, p2, Fraction(0)))
    links = [Link(link.id, moved.get(link.u, link.u), moved.get(link.v, link.v), link.cost)
             for link in inst.links]
    name = None if inst.name is None else f"{inst.name}-l2l"
    reduced = TapInstance(frozenset(vertices), inst.root, tuple(edges), tuple(links + helpers), name)
    mapping = LinkMapping(frozenset(taken_l - {h.id for h in helpers}),
                          frozenset(h.id for h in helpers), moved)
    return reduced, mapping
