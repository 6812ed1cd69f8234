from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import general_corpus
from smalltap.decompose import (
    approximate,
    build_level_candidate,
    candidate_cost_bound,
    check_star,
    copy_coefficient,
    ratio_bound,
    solve_level_candidate,
    transform_link,
    worst_case_costs,
)
from smalltap.errors import LevelOutOfRange, NotLeafToLeaf
from smalltap.exact import is_feasible, solve_exact, solve_star_exact
from smalltap.generators import random_instance, tight_example, worst_case_instance
from smalltap.instance import (
    Link,
    LinkClass,
    TapInstance,
    classify,
    covered_edges,
    lca,
    leaf_to_leaf,
    partition_by_lca_level,
    validate,
)

F = Fraction


def copies(star, origin):
    return sorted(tuple(sorted(t.ends)) for t in star.links if t.origin == origin)


def test_ratio_bound():
    assert [ratio_bound(k) for k in (1, 2, 3)] == [1, F(3, 2), F(7, 4)]
    with pytest.raises(ValueError):
        ratio_bound(0)


def test_candidate_cost_bound_examples():
    assert [candidate_cost_bound(l, [1, 1, 2]) for l in (1, 2, 3)] == [7, 7, 7]
    assert [candidate_cost_bound(l, [1, 1, 2, 4]) for l in (1, 2, 3, 4)] == [15] * 4
    assert candidate_cost_bound(1, [1, 0, 0, 0]) == 1
    with pytest.raises(LevelOutOfRange):
        candidate_cost_bound(4, [1, 1, 2])
    with pytest.raises(LevelOutOfRange):
        candidate_cost_bound(0, [1])


def closed_form(l, c):
    """Per-level bounds written out term by term."""
    k = len(c)
    c = [None, *c]
    tail = lambda start: 2 * sum(c[i] for i in range(start, k + 1))
    if l == 1:
        return c[1] + tail(2)
    if l == 2:
        return 2 * c[1] + c[2] + tail(3)
    if l == 3:
        return 3 * c[1] + 2 * c[2] + c[3] + tail(4)
    return 3 * c[1] + 4 * sum(c[i] for i in range(2, l - 1)) + 2 * c[l - 1] + c[l] + tail(l + 1)


@settings(max_examples=100)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=9))
def test_candidate_cost_bound_closed_form(costs):
    for l in range(1, len(costs) + 1):
        assert candidate_cost_bound(l, costs) == closed_form(l, costs)


def test_worst_case_costs():
    assert worst_case_costs(1) == [1]
    assert worst_case_costs(2) == [1, 1]
    assert worst_case_costs(5) == [1, 1, 2, 4, 8]
    for k in range(1, 11):
        c = worst_case_costs(k)
        assert c == [1] + [2 ** (l - 2) for l in range(2, k + 1)]
        bounds = {candidate_cost_bound(l, c) for l in range(1, k + 1)}
        assert len(bounds) == 1
        assert bounds.pop() / sum(c) == ratio_bound(k)


def test_copy_coefficient_pattern_two_levels():
    assert [copy_coefficient(q, 2) for q in (1, 2)] == [2, 1]
    assert [copy_coefficient(q, 1) for q in (1, 2, 3)] == [1, 2, 2]


def test_tight_example_level_one(te):
    reduced, _ = leaf_to_leaf(te)
    (star,) = build_level_candidate(reduced, 1)
    assert star.center == "r"
    assert set(star.tree_edges) == set(validate(reduced).edges)
    assert copies(star, "l5") == [("b1", "v"), ("b2", "v")]
    assert copies(star, "l6") == [("b3", "v"), ("b4", "v")]
    for i, (a, b) in {"l1": ("a1", "a2"), "l2": ("a1", "b4"), "l3": ("a2", "b2"),
                      "l4": ("a2", "b1")}.items():
        assert copies(star, i) == [(a, b)]
    check_star(star)


def test_tight_example_level_two(te):
    reduced, _ = leaf_to_leaf(te)
    stars = build_level_candidate(reduced, 2)
    assert [s.center for s in stars] == ["r", "v"]
    residual, at_v = stars
    assert ("r", "v") in at_v.tree_edges
    assert copies(residual, "l1") == [("a1", "a2")]
    assert copies(at_v, "l5") == [("b1", "b2")]
    # l2 = (b4, a1) is split at the root: one up-link per star
    assert copies(at_v, "l2") == [("b4", "r")]
    assert copies(residual, "l2") == [("a1", "r")]
    for s in stars:
        check_star(s)


def test_two_level_copy_counts(te):
    reduced, _ = leaf_to_leaf(te)
    idx = validate(reduced)
    for link in te.links:
        q = idx.level[lca(idx, link.u, link.v)]
        assert len(transform_link(idx, link, 2)) <= copy_coefficient(q, 2)


def test_level_errors(te):
    with pytest.raises(LevelOutOfRange):
        build_level_candidate(te, 3)
    with pytest.raises(LevelOutOfRange):
        build_level_candidate(te, 0)
    with pytest.raises(NotLeafToLeaf):
        build_level_candidate(te.with_links([*te.links, Link("x", "v", "a1", 1)]), 1)


def test_level_candidates_tight_example(te):
    opt = solve_exact(te)
    parts = partition_by_lca_level(validate(te), [te.link(i) for i in opt.link_ids])
    c = [sum((l.cost for l in p), F(0)) for p in parts]
    reduced, mapping = leaf_to_leaf(te)
    for l in (1, 2):
        cand = solve_level_candidate(reduced, l)
        ids = mapping.backward(cand.link_ids)
        assert is_feasible(te, ids)
        assert 3 <= te.cost_of(ids) <= candidate_cost_bound(l, c)


def test_level_one_stars_match_brute_force():
    unit = tight_example(costs=(1,) * 6)
    reduced, _ = leaf_to_leaf(unit)
    for star in build_level_candidate(reduced, 1):
        inst = star.as_instance()
        assert solve_star_exact(star) == solve_exact(inst, "exhaustive")


def test_p3_every_level():
    inst = TapInstance({"r", "a", "v", "b"}, "r", [("r", "a"), ("r", "v"), ("v", "b")],
                       [Link("ab", "a", "b", 7)])
    reduced, mapping = leaf_to_leaf(inst)
    for l in range(1, validate(reduced).k + 1):
        cand = solve_level_candidate(reduced, l)
        assert mapping.backward(cand.link_ids) == {"ab"}


def test_approximate_ratios(te):
    res = approximate(te)
    assert res.k == 2 and res.ratio_bound == F(3, 2)
    assert is_feasible(te, res.best.link_ids) and res.best.cost == 3
    three = random_instance(3, 2, 0.5, 10, 4)
    assert approximate(three).ratio_bound == F(7, 4)


def test_approximate_single_level_is_exact():
    leaves = [f"x{i}" for i in range(5)]
    inst = TapInstance({"r", *leaves}, "r", [("r", x) for x in leaves],
                       [Link(f"e{i}", leaves[i], leaves[(i + 1) % 5], 1 + i % 3) for i in range(5)])
    res = approximate(inst)
    assert res.ratio_bound == 1 and res.best.cost == solve_exact(inst).cost


def test_parallel_matches_serial():
    inst = general_corpus(20)[7]
    a, b = approximate(inst), approximate(inst, n_jobs=2)
    assert a.best.link_ids == b.best.link_ids and a.all_costs == b.all_costs


def test_worst_case_instance():
    for k in range(1, 6):
        inst = worst_case_instance(k)
        idx = validate(inst)
        assert idx.k == k
        opt = solve_exact(inst)
        parts = partition_by_lca_level(idx, [inst.link(i) for i in opt.link_ids])
        assert [sum((l.cost for l in p), F(0)) for p in parts] == worst_case_costs(k)
        assert approximate(inst).best.cost <= ratio_bound(k) * opt.cost


def _corpus_sample():
    return general_corpus(200)[::5]


@pytest.mark.parametrize("inst", _corpus_sample(), ids=lambda i: i.name)
def test_stars_partition_and_route(inst):
    reduced, _ = leaf_to_leaf(inst)
    idx = validate(reduced)
    for l in range(1, idx.k + 1):
        stars = build_level_candidate(idx, l)
        owned = [e for s in stars for e in s.tree_edges]
        assert sorted(owned) == sorted(idx.edges)
        for s in stars:
            sidx = validate(s.as_instance())
            edges = set(s.tree_edges)
            for t in s.links:
                assert covered_edges(idx, t.ends) <= edges
                assert classify(sidx, t.ends, s.center) is not LinkClass.IN
        for link in reduced.links:
            q = idx.level[lca(idx, link.u, link.v)]
            pieces = transform_link(idx, link, l)
            assert len(pieces) <= copy_coefficient(q, l)
            assert sum((t.cost for t in pieces), F(0)) <= copy_coefficient(q, l) * link.cost
            # the copies split the original path exactly
            paths = [covered_edges(idx, t.ends) for t in pieces]
            assert sum(len(p) for p in paths) == len(covered_edges(idx, link))
            assert frozenset().union(*paths) == covered_edges(idx, link)
