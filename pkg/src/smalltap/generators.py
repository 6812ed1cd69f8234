"""Builtin instances and seeded random instance generators."""

from __future__ import annotations

import random
from fractions import Fraction

from .instance import Link, TapInstance, covered_edges, validate


def tight_example(costs=(1, 1, 1, 1, 1, 0)) -> TapInstance:
    """The 2-level instance on which ``(1/2,1/2,1/2,1/2,1/2,1)`` is an odd-LP
    vertex that no scaling of its in-link part below 2 makes integral.

    Default costs give integral optimum 3 against an odd-LP value of at most 5/2.
    """
    edges = [("r", "a1"), ("r", "a2"), ("r", "v")] + [("v", f"b{i}") for i in range(1, 5)]
    ends = [("a1", "a2"), ("b4", "a1"), ("b2", "a2"), ("b1", "a2"), ("b1", "b2"), ("b3", "b4")]
    links = [Link(f"l{i}", u, v, Fraction(c)) for i, ((u, v), c) in enumerate(zip(ends, costs), 1)]
    vertices = {"r", "a1", "a2", "v", "b1", "b2", "b3", "b4"}
    return TapInstance(frozenset(vertices), "r", tuple(edges), tuple(links), "tight-example")


TIGHT_POINT = {f"l{i}": Fraction(1, 2) for i in range(1, 6)} | {"l6": Fraction(1)}
TIGHT_CROSS = ("l1", "l2", "l3", "l4")
TIGHT_IN = ("l5", "l6")


def worst_case_instance(k: int) -> TapInstance:
    """Caterpillar of depth k whose unique solution costs ``c_l`` at lca level l,
    with ``c`` the equalising cost vector of the level analysis.

    Spine ``w1 .. wk``; ``wj`` has leaf ``pj`` and ``wk`` also has ``qk``.
    Link ``(pj, p{j+1})`` is the only one over spine edge ``(wj, w{j+1})``.
    """
    from .decompose import worst_case_costs

    if k < 1:
        raise ValueError("k must be at least 1")
    c = worst_case_costs(k)
    edges, links = [], []
    for j in range(1, k + 1):
        edges.append((f"w{j}", f"p{j}"))
        if j < k:
            edges.append((f"w{j}", f"w{j + 1}"))
            links.append(Link(f"x{j}", f"p{j}", f"p{j + 1}", c[j - 1]))
    edges.append((f"w{k}", f"q{k}"))
    links.append(Link(f"x{k}", f"p{k}", f"q{k}", c[k - 1]))
    vertices = {v for e in edges for v in e}
    return TapInstance(frozenset(vertices), "w1", tuple(edges), tuple(links), f"worst-case-{k}")


def _random_tree(rng: random.Random, levels: int, branching: int,
                 p_internal: float) -> tuple[list[tuple[str, str]], int]:
    """Tree with internal nodes on exactly levels ``1..levels``."""
    edges = []
    frontier = ["n0"]
    count = 1
    for lvl in range(1, levels + 1):
        nxt = []
        for u in frontier:
            kids = [f"n{count + t}" for t in range(branching)]
            count += branching
            edges += [(u, w) for w in kids]
            if lvl < levels:
                internal = [w for w in kids if rng.random() < p_internal]
                nxt += internal
        if lvl < levels and not nxt:
            # keep the depth exact
            nxt = [rng.choice([w for _, w in edges[-branching * len(frontier):]])]
        frontier = nxt
    return edges, count


def random_instance(levels: int, branching: int = 2, link_density: float = 0.3,
                    cost_max: int = 10, seed: int = 0, p_internal: float = 0.5,
                    max_links: int | None = None) -> TapInstance:
    """Random leaf-to-leaf instance on a tree with exactly ``levels`` internal levels.

    Every leaf pair becomes a link with probability ``link_density`` (at most
    ``max_links`` of them are kept); then each still-uncovered edge gets one
    more leaf-to-leaf link across it, so the result is always feasible.
    """
    if levels < 1 or branching < 2:
        raise ValueError("need levels >= 1 and branching >= 2")
    rng = random.Random(seed)
    edges, n = _random_tree(rng, levels, branching, p_internal)
    vertices = frozenset(f"n{i}" for i in range(n))
    base = TapInstance(vertices, "n0", tuple(edges), (), f"random-k{levels}-s{seed}")
    idx = validate(base)
    leaves = sorted(idx.leaves, key=lambda v: int(v[1:]))
    pairs = [(a, b) for i, a in enumerate(leaves) for b in leaves[i + 1:]]
    chosen = [p for p in pairs if rng.random() < link_density]
    if max_links is not None:
        chosen = chosen[:max_links]
    links = [Link(f"e{t}", a, b, Fraction(rng.randint(0, cost_max)))
             for t, (a, b) in enumerate(chosen)]
    covered = set()
    for l in links:
        covered |= covered_edges(idx, l)
    for p, c in idx.edges:
        if (p, c) in covered:
            continue
        inside = sorted(set(idx.subtree(c)) & idx.leaves, key=lambda v: int(v[1:]))
        outside = [v for v in leaves if v not in inside]
        link = Link(f"e{len(links)}", rng.choice(inside), rng.choice(outside),
                    Fraction(rng.randint(0, cost_max)))
        links.append(link)
        covered |= covered_edges(idx, link)
    return base.with_links(links)


def random_star_instance(seed: int, max_leaves: int = 10, max_links: int = 12,
                         cost_max: int = 10, p_cross: float = 0.8,
                         cost_min: int = 0) -> TapInstance:
    """Random feasible instance whose links are all cross- or up-links w.r.t. the root.

    The tree is grown by repeatedly splitting a leaf or adding a sibling until
    it has between 3 and ``max_leaves`` leaves (depth at most 4).  Cross links
    join leaves of different root branches.  Integer costs are drawn from
    ``cost_min..cost_max``; a narrow positive range such as ``1..3`` makes odd
    cycles of cross links loosen the edge LP more often.
    """
    rng = random.Random(seed)
    target = rng.randint(3, max_leaves)
    parent = {"s1": "s0", "s2": "s0"}
    depth = {"s0": 1, "s1": 2, "s2": 2}
    kids = {"s0": ["s1", "s2"], "s1": [], "s2": []}
    n = 3

    def add(p):
        nonlocal n
        w = f"s{n}"
        n += 1
        parent[w], depth[w], kids[w] = p, depth[p] + 1, []
        kids[p].append(w)

    while sum(1 for v in kids if not kids[v]) < target:
        leaves = [v for v in kids if not kids[v]]
        splittable = [v for v in leaves if depth[v] < 4]
        if splittable and rng.random() < 0.5:
            u = rng.choice(splittable)
            add(u)
            add(u)
        else:
            add(rng.choice([v for v in kids if kids[v]]))
    edges = [(parent[w], w) for w in sorted(parent, key=lambda v: int(v[1:]))]
    base = TapInstance(frozenset(kids), "s0", tuple(edges), (), f"star-s{seed}")
    idx = validate(base)
    nonroot = sorted(parent, key=lambda v: int(v[1:]))
    branch = {v: idx.ancestor_at_level(v, 2) for v in nonroot}
    leaves = sorted(idx.leaves, key=lambda v: int(v[1:]))
    cross = [(a, b) for i, a in enumerate(leaves) for b in leaves[i + 1:]
             if branch[a] != branch[b]]
    up = []
    for a in nonroot:
        x = a
        while x != "s0":
            x = idx.parent[x]
            up.append((a, x))
    while True:
        want = rng.randint(3, max_links)
        ends = [rng.choice(cross) if rng.random() < p_cross else rng.choice(up)
                for _ in range(want)]
        covered = set()
        for e in ends:
            covered |= covered_edges(idx, e)
        # one leaf-to-root up-link repairs every uncovered edge above that leaf
        for leaf in leaves:
            path = covered_edges(idx, (leaf, "s0"))
            if not path <= covered:
                ends.append((leaf, "s0"))
                covered |= path
        if len(ends) <= max_links:
            break
    links = [Link(f"t{t}", a, b, Fraction(rng.randint(cost_min, cost_max)))
             for t, (a, b) in enumerate(ends)]
    return base.with_links(links)
