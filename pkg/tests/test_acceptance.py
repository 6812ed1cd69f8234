"""Acceptance criteria, one test each.

Every test prints ``[PASS]`` or ``[FAIL]`` with its criterion number and
elapsed time; the lines are repeated in the pytest terminal summary.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE_LINES
from corpus import general_corpus, internal_endpoint_corpus, solved_general, star_corpus
from smalltap.decompose import (
    approximate,
    candidate_cost_bound,
    ratio_bound,
    worst_case_costs,
)
from smalltap.exact import is_feasible, solve_exact, solve_star_exact, tap_polytope_membership
from smalltap.generators import TIGHT_IN, TIGHT_POINT, tight_example
from smalltap.instance import leaf_to_leaf, partition_by_lca_level, validate
from smalltap.lp import (
    check_point_odd_feasible,
    is_extreme_point,
    solve_edge_lp,
    solve_odd_lp,
    tight_rank,
)

F = Fraction


@contextmanager
def criterion(number, title, limit=None):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert limit is None or elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        budget = f" (limit {limit}s)" if limit else ""
        line = f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {title}: {elapsed:.2f}s{budget}"
        ACCEPTANCE_LINES.append(line)
        print(line)


def test_01_tight_example_exact():
    with criterion(1, "tight example optimum is 3", limit=1):
        assert solve_exact(tight_example()).cost == 3


def test_02_tight_example_lp():
    with criterion(2, "odd LP <= 5/2, half point feasible, gap >= 6/5", limit=5):
        te = tight_example()
        odd = solve_odd_lp(te).value
        assert odd <= F(5, 2)
        assert check_point_odd_feasible(te, TIGHT_POINT) is True
        assert solve_exact(te).cost / odd >= F(6, 5)


def test_03_extreme_point():
    with criterion(3, "half point is extreme, tight rank 6"):
        te = tight_example()
        assert is_extreme_point(te, TIGHT_POINT)
        assert tight_rank(te, TIGHT_POINT) == 6


def test_04_membership():
    listed = [
        {"l1", "l6", "l3", "l4"}, {"l1", "l6", "l4", "l5"}, {"l1", "l6", "l3", "l5"},
        {"l2", "l6", "l3", "l4"}, {"l2", "l6", "l4", "l5"}, {"l2", "l6", "l3", "l5"},
    ]
    with criterion(4, "scaled points rejected for alpha < 2, listed solutions accepted"):
        te = tight_example()
        for alpha in (F(1), F(3, 2), F(199, 100)):
            point = {i: v * alpha if i in TIGHT_IN else v for i, v in TIGHT_POINT.items()}
            assert not tap_polytope_membership(te, point).member
            assert not tap_polytope_membership(te, point, dominant=True).member
        for B in listed:
            res = tap_polytope_membership(te, {i: 1 for i in B})
            assert res.member and res.weights == {frozenset(B): 1}


def test_05_star_integrality():
    with criterion(5, "odd LP equals optimum on 200 star instances", limit=60):
        stars = star_corpus(200)
        for inst in stars:
            idx = validate(inst)
            assert len(idx.leaves) <= 10 and len(inst.links) <= 12
            assert all(0 <= l.cost <= 10 and l.cost.denominator == 1 for l in inst.links)
            assert solve_odd_lp(idx).value == solve_star_exact(inst).cost, inst.name


def test_06_approximation_guarantee():
    with criterion(6, "best candidate within 2 - 1/2^(k-1) on 200 instances", limit=120):
        expected = {2: F(3, 2), 3: F(7, 4), 4: F(15, 8)}
        seen = set()
        for inst, opt in solved_general(200):
            assert len(inst.links) <= 14
            res = approximate(inst)
            assert res.ratio_bound == expected[res.k]
            seen.add(res.k)
            assert is_feasible(inst, res.best.link_ids)
            assert res.best.cost == inst.cost_of(res.best.link_ids)
            assert res.best.cost <= res.ratio_bound * opt.cost, inst.name
        assert seen == {2, 3, 4}


def test_07_per_level_bounds():
    with criterion(7, "each candidate within its C_l of the optimum's level split", limit=120):
        for inst, opt in solved_general(200):
            idx = validate(inst)
            parts = partition_by_lca_level(idx, [inst.link(i) for i in opt.link_ids])
            c = [sum((l.cost for l in p), F(0)) for p in parts]
            res = approximate(inst)
            for cand in res.candidates:
                assert cand.cost <= candidate_cost_bound(cand.level, c), (inst.name, cand.level)


def test_08_cost_bound_algebra():
    with criterion(8, "worst-case costs equalise C_l with ratio 2 - 1/2^(k-1)", limit=1):
        for k in range(1, 11):
            c = worst_case_costs(k)
            bounds = [candidate_cost_bound(l, c) for l in range(1, k + 1)]
            assert len(set(bounds)) == 1
            assert bounds[0] / sum(c) == 2 - F(1, 2 ** (k - 1)) == ratio_bound(k)


def test_09_lp_chain():
    with criterion(9, "edge LP <= odd LP <= optimum on the full corpus", limit=120):
        pairs = list(solved_general(200))
        pairs += [(s, solve_exact(s)) for s in star_corpus(200)]
        for inst, opt in pairs:
            edge = solve_edge_lp(inst).objective_value
            odd = solve_odd_lp(inst).value
            assert edge <= odd <= opt.cost, inst.name


def test_10_leaf_to_leaf_bijection():
    with criterion(10, "leaf-to-leaf mapping preserves feasibility and cost on 100 instances"):
        moved = 0
        for inst in internal_endpoint_corpus(100):
            opt = solve_exact(inst)
            reduced, mapping = leaf_to_leaf(inst)
            moved += bool(set(mapping.moved_endpoints) & {x for l in inst.links for x in l.ends})
            fwd = mapping.forward(opt.link_ids)
            assert is_feasible(reduced, fwd) and reduced.cost_of(fwd) == opt.cost
            ropt = solve_exact(reduced)
            back = mapping.backward(ropt.link_ids)
            assert is_feasible(inst, back) and inst.cost_of(back) <= ropt.cost
        assert moved >= 50
