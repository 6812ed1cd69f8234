from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smalltap.errors import MalformedProblem
from smalltap.lp import build_edge_lp
from smalltap.simplex import LpProblem, LpStatus, Row, solve_lp


def test_single_variable():
    sol = solve_lp(LpProblem(("x",), {"x": 1}, [Row({"x": 1}, 1)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.values == {"x": 1} and sol.objective_value == 1


def test_infeasible():
    sol = solve_lp(LpProblem(("x",), {}, [Row({"x": 1}, 1), Row({"x": -1}, 0)]))
    assert sol.status is LpStatus.INFEASIBLE


def test_unbounded():
    sol = solve_lp(LpProblem(("x", "y"), {"x": -1}, [Row({"x": 1, "y": -1}, 0)]))
    assert sol.status is LpStatus.UNBOUNDED


def test_triangle_cover_is_half_integral():
    rows = [Row({"a": 1, "b": 1}, 1), Row({"b": 1, "c": 1}, 1), Row({"a": 1, "c": 1}, 1)]
    sol = solve_lp(LpProblem(("a", "b", "c"), {"a": 1, "b": 1, "c": 1}, rows))
    assert sol.objective_value == Fraction(3, 2)
    assert set(sol.values.values()) == {Fraction(1, 2)}


def test_redundant_and_degenerate_rows():
    rows = [Row({"x": 1, "y": 1}, 2), Row({"x": 2, "y": 2}, 4), Row({"x": 1}, 0), Row({}, 0)]
    sol = solve_lp(LpProblem(("x", "y"), {"x": 1, "y": 2}, rows))
    assert sol.objective_value == 2 and sol.values == {"x": 2, "y": 0}


def test_malformed():
    with pytest.raises(MalformedProblem):
        LpProblem(("x",), {"y": 1}, [])
    with pytest.raises(MalformedProblem):
        LpProblem(("x",), {}, [Row({"z": 1}, 1)])
    with pytest.raises(MalformedProblem):
        LpProblem(("x", "x"), {}, [])
    with pytest.raises(MalformedProblem):
        solve_lp("not a problem")


def _solve_square(A, b):
    """Gaussian elimination over Q; None if singular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c] / M[c][c]
                M[r] = [a - f * p for a, p in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_enumeration_optimum(p: LpProblem):
    """Minimum over all vertices of {Ax >= b, x >= 0}: every choice of n tight
    constraints among rows and bounds that yields a feasible point."""
    names = p.variables
    n = len(names)
    cons = [([row.coeffs.get(v, 0) for v in names], row.rhs) for row in p.rows]
    cons += [([int(v == w) for w in names], 0) for v in names]
    best = None
    for pick in combinations(range(len(cons)), n):
        x = _solve_square([cons[i][0] for i in pick], [cons[i][1] for i in pick])
        if x is None:
            continue
        point = dict(zip(names, x))
        if p.is_feasible_point(point):
            val = p.objective_value(point)
            best = val if best is None else min(best, val)
    return best


def test_edge_lp_of_tight_example_matches_vertex_enumeration(te):
    p = build_edge_lp(te)
    assert len(p.rows) == 7
    sol = solve_lp(p)
    assert sol.objective_value == vertex_enumeration_optimum(p) == Fraction(9, 4)
    assert p.is_feasible_point(sol.values)


@st.composite
def covering_lps(draw):
    n = draw(st.integers(1, 4))
    names = tuple(f"x{i}" for i in range(n))
    rows = []
    for _ in range(draw(st.integers(1, 4))):
        coeffs = {v: draw(st.integers(-2, 3)) for v in names}
        if not any(a > 0 for a in coeffs.values()):
            coeffs[names[0]] = 1
        rows.append(Row(coeffs, draw(st.integers(-2, 3))))
    cost = {v: draw(st.integers(0, 5)) for v in names}
    return LpProblem(names, cost, rows)


@settings(max_examples=150, deadline=None)
@given(covering_lps())
def test_simplex_matches_vertex_enumeration(p):
    # non-negative costs keep the problem bounded, so the optimum sits at a vertex
    sol = solve_lp(p)
    expected = vertex_enumeration_optimum(p)
    if expected is None:
        assert sol.status is LpStatus.INFEASIBLE
    else:
        assert sol.status is LpStatus.OPTIMAL
        assert sol.objective_value == expected
        assert p.is_feasible_point(sol.values)
