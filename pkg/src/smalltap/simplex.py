"""Exact rational LP solver.

Problems are ``min c.x  s.t.  A x >= b,  x >= 0`` over :class:`Fraction`.
The solver is a dense two-phase tableau simplex with Bland's rule, so it
terminates on degenerate problems and returns a basic (vertex) solution that
depends only on the variable order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import MalformedProblem

ZERO = Fraction(0)


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Row:
    """One ``>=`` constraint: ``sum(coeffs[v] * x[v]) >= rhs``."""

    coeffs: Mapping[str, Fraction]
    rhs: Fraction
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coeffs",
                           {v: Fraction(a) for v, a in self.coeffs.items() if a != 0})
        object.__setattr__(self, "rhs", Fraction(self.rhs))

    def activity(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((a * values.get(v, ZERO) for v, a in self.coeffs.items()), ZERO)

    def slack(self, values: Mapping[str, Fraction]) -> Fraction:
        return self.activity(values) - self.rhs

    def key(self) -> tuple:
        return (tuple(sorted(self.coeffs.items())), self.rhs)


@dataclass(frozen=True)
class LpProblem:
    variables: tuple[str, ...]
    objective: Mapping[str, Fraction]
    rows: tuple[Row, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "rows", tuple(self.rows))
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise MalformedProblem("duplicate variable names")
        for v in self.objective:
            if v not in declared:
                raise MalformedProblem(f"objective uses undeclared variable {v!r}")
        for row in self.rows:
            for v in row.coeffs:
                if v not in declared:
                    raise MalformedProblem(f"row {row.label!r} uses undeclared variable {v!r}")

    def with_rows(self, rows: Iterable[Row]) -> LpProblem:
        return LpProblem(self.variables, self.objective, self.rows + tuple(rows))

    def is_feasible_point(self, values: Mapping[str, Fraction]) -> bool:
        if any(values.get(v, ZERO) < 0 for v in self.variables):
            return False
        return all(row.slack(values) >= 0 for row in self.rows)

    def objective_value(self, values: Mapping[str, Fraction]) -> Fraction:
        return sum((Fraction(c) * values.get(v, ZERO) for v, c in self.objective.items()), ZERO)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: Mapping[str, Fraction] = field(default_factory=dict)
    objective_value: Fraction | None = None
    basis: tuple[str, ...] = ()

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], basis: list[int]):
        self.rows = rows  # each row: coefficients..., rhs
        self.basis = basis
        self.obj: list[Fraction] = []

    def pivot(self, r: int, j: int) -> None:
        rows = self.rows
        prow = rows[r]
        piv = prow[j]
        if piv != 1:
            prow = [a / piv for a in prow]
            rows[r] = prow
        nz = [t for t, a in enumerate(prow) if a]
        for i, row in enumerate(rows):
            f = row[j]
            if i != r and f:
                for t in nz:
                    row[t] -= f * prow[t]
        f = self.obj[j]
        if f:
            obj = self.obj
            for t in nz:
                obj[t] -= f * prow[t]
        self.basis[r] = j

    def run(self, eligible: int) -> bool:
        """Minimise with Bland's rule over columns ``< eligible``.

        Returns False if the objective is unbounded below.
        """
        rows, obj = self.rows, self.obj
        while True:
            j = next((t for t in range(eligible) if obj[t] < 0), None)
            if j is None:
                return True
            best = None
            for i, row in enumerate(rows):
                a = row[j]
                if a > 0:
                    key = (row[-1] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], j)


def solve_lp(p: LpProblem) -> LpSolution:
    """Solve ``p`` exactly; see the module docstring for the problem form."""
    if not isinstance(p, LpProblem):
        raise MalformedProblem("expected an LpProblem")
    names = list(p.variables)
    n, m = len(names), len(p.rows)
    col = {v: t for t, v in enumerate(names)}
    cost = [Fraction(p.objective.get(v, 0)) for v in names]

    # columns: x (n), surplus (m), artificial (m), rhs
    width = n + 2 * m + 1
    rows: list[list[Fraction]] = []
    basis: list[int] = []
    for i, row in enumerate(p.rows):
        r = [ZERO] * width
        for v, a in row.coeffs.items():
            r[col[v]] = a
        r[n + i] = Fraction(-1)
        r[-1] = row.rhs
        if row.rhs <= 0:
            # surplus column can start basic after negating the row
            r = [-a for a in r]
            basis.append(n + i)
        else:
            r[n + m + i] = Fraction(1)
            basis.append(n + m + i)
        rows.append(r)
    tab = _Tableau(rows, basis)

    # phase 1: minimise the sum of artificials
    tab.obj = [ZERO] * width
    for t in range(n + m, n + 2 * m):
        tab.obj[t] = Fraction(1)
    for i, b in enumerate(basis):
        if b >= n + m:
            tab.obj = [o - a for o, a in zip(tab.obj, rows[i])]
    tab.run(n + 2 * m)
    if -tab.obj[-1] > 0:
        return LpSolution(LpStatus.INFEASIBLE)

    # drive zero-level artificials out of the basis; drop redundant rows
    i = 0
    while i < len(tab.rows):
        if tab.basis[i] >= n + m:
            j = next((t for t in range(n + m) if tab.rows[i][t] != 0), None)
            if j is None:
                del tab.rows[i]
                del tab.basis[i]
                continue
            tab.pivot(i, j)
        i += 1

    # phase 2
    obj = cost + [ZERO] * (width - n)
    for i, b in enumerate(tab.basis):
        cb = obj[b]
        if cb:
            row = tab.rows[i]
            obj = [o - cb * a for o, a in zip(obj, row)]
    tab.obj = obj
    if not tab.run(n + m):
        return LpSolution(LpStatus.UNBOUNDED)

    values = {v: ZERO for v in names}
    for i, b in enumerate(tab.basis):
        if b < n:
            values[names[b]] = tab.rows[i][-1]
    value = sum((c * values[v] for c, v in zip(cost, names)), ZERO)
    basic = tuple(names[b] if b < n else f"surplus[{b - n}]" for b in tab.basis)
    return LpSolution(LpStatus.OPTIMAL, values, value, basic)
