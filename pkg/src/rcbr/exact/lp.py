"""Deterministic exact simplex over ``Fraction``.

Dense two-phase tableau with Bland's rule (lowest-index entering column,
lowest-index basic variable among tied ratios).  Variables are free unless a
row of the form ``-c*x_k <= 0`` (c > 0) marks them nonnegative; such rows and
rows fixing a single variable to zero are folded in by a presolve so belief
simplices do not pay for variable splitting.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

LE, EQ, LT = "<=", "=", "<"
_FLIP = {">=": LE, ">": LT}

ZERO = Fraction(0)
ONE = Fraction(1)


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    rel: str
    bound: Fraction

    def value(self, x: Sequence[Fraction]) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), ZERO)

    def holds(self, x: Sequence[Fraction]) -> bool:
        lhs = self.value(x)
        if self.rel == LE:
            return lhs <= self.bound
        if self.rel == EQ:
            return lhs == self.bound
        return lhs < self.bound


def constraint(coeffs: Iterable, rel: str, bound) -> Constraint:
    """Build a row; ``>=`` and ``>`` are stored negated as ``<=`` and ``<``."""
    coeffs = tuple(Fraction(c) for c in coeffs)
    bound = Fraction(bound)
    if rel in _FLIP:
        return Constraint(tuple(-c for c in coeffs), _FLIP[rel], -bound)
    if rel not in (LE, EQ, LT):
        raise ValueError(f"unknown relation {rel!r}")
    return Constraint(coeffs, rel, bound)


@dataclass(frozen=True)
class LinearSystem:
    n: int
    constraints: tuple[Constraint, ...]
    objective: Optional[tuple[Fraction, ...]] = None

    @classmethod
    def build(cls, n: int, rows: Iterable, objective=None) -> LinearSystem:
        cons = tuple(r if isinstance(r, Constraint) else constraint(*r) for r in rows)
        obj = None if objective is None else tuple(Fraction(c) for c in objective)
        return cls(n, cons, obj)

    def with_rows(self, rows: Iterable) -> LinearSystem:
        extra = tuple(r if isinstance(r, Constraint) else constraint(*r) for r in rows)
        return LinearSystem(self.n, self.constraints + extra, self.objective)

    def with_objective(self, objective) -> LinearSystem:
        return LinearSystem(self.n, self.constraints, tuple(Fraction(c) for c in objective))

    def check_dimensions(self) -> None:
        for i, c in enumerate(self.constraints):
            if len(c.coeffs) != self.n:
                raise DimensionError(
                    f"constraint {i} has {len(c.coeffs)} coefficients, expected {self.n}")
        if self.objective is not None and len(self.objective) != self.n:
            raise DimensionError(
                f"objective has {len(self.objective)} coefficients, expected {self.n}")

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        if len(x) != self.n:
            raise DimensionError(f"point has {len(x)} coordinates, expected {self.n}")
        return all(c.holds(x) for c in self.constraints)

    @property
    def has_strict(self) -> bool:
        return any(c.rel == LT for c in self.constraints)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    optimum: Optional[Fraction] = None
    witness: Optional[tuple[Fraction, ...]] = None


def lp_feasible(system: LinearSystem) -> Optional[tuple[Fraction, ...]]:
    """A point satisfying every row exactly, or None.

    Strict rows get a shared margin variable ``t`` (``a.x + t <= b``,
    ``0 <= t <= 1``); the system is feasible iff the largest margin is positive.
    """
    system.check_dimensions()
    if system.objective is not None:
        raise ValueError("lp_feasible takes a system without objective")
    n = system.n
    if not system.has_strict:
        rows = [(c.coeffs, c.rel, c.bound) for c in system.constraints]
        status, _, x = _solve(n, rows, None)
        return x if status == "optimal" else None
    rows = []
    for c in system.constraints:
        if c.rel == LT:
            rows.append((c.coeffs + (ONE,), LE, c.bound))
        else:
            rows.append((c.coeffs + (ZERO,), c.rel, c.bound))
    rows.append(((ZERO,) * n + (-ONE,), LE, ZERO))
    rows.append(((ZERO,) * n + (ONE,), LE, ONE))
    status, value, x = _solve(n + 1, rows, (ZERO,) * n + (ONE,))
    if status != "optimal" or value <= 0:
        return None
    return x[:n]


def lp_optimize(system: LinearSystem) -> LPResult:
    """Maximize ``system.objective`` over the polyhedron."""
    system.check_dimensions()
    if system.objective is None:
        raise ValueError("lp_optimize needs an objective")
    if system.has_strict:
        raise ValueError("strict rows are only allowed in feasibility queries")
    rows = [(c.coeffs, c.rel, c.bound) for c in system.constraints]
    status, value, x = _solve(system.n, rows, system.objective)
    return LPResult(status, value, x)


def _solve(n, rows, objective):
    # presolve: variables fixed at zero, variables known nonnegative
    fixed: set[int] = set()
    nonneg: set[int] = set()
    kept = []
    for coeffs, rel, bound in rows:
        nz = [k for k in range(n) if coeffs[k]]
        if len(nz) == 1 and bound == 0:
            k = nz[0]
            if rel == EQ:
                fixed.add(k)
                continue
            if rel == LE and coeffs[k] < 0:
                nonneg.add(k)
                continue
        kept.append((coeffs, rel, bound))

    live = [k for k in range(n) if k not in fixed]
    # column layout: (variable, sign)
    columns: list[tuple[int, int]] = []
    for k in live:
        columns.append((k, 1))
        if k not in nonneg:
            columns.append((k, -1))
    nx = len(columns)

    body = []
    for coeffs, rel, bound in kept:
        row = [coeffs[k] * sgn if coeffs[k] else ZERO for k, sgn in columns]
        if not any(row):
            if (rel == LE and not ZERO <= bound) or (rel == EQ and bound != 0):
                return "infeasible", None, None
            continue
        body.append((row, rel, bound))

    n_slack = sum(1 for _, rel, _ in body if rel == LE)
    total = nx + n_slack
    tableau: list[list[Fraction]] = []
    basis: list[int] = []
    artificial_rows = []
    slack_at = nx
    for row, rel, bound in body:
        full = row + [ZERO] * n_slack
        slack_col = None
        if rel == LE:
            full[slack_at] = ONE
            slack_col = slack_at
            slack_at += 1
        if bound < 0:
            full = [-v for v in full]
            bound = -bound
            if slack_col is not None:
                slack_col = None  # slack now has coefficient -1
        tableau.append(full + [bound])
        if slack_col is not None:
            basis.append(slack_col)
        else:
            basis.append(-1)
            artificial_rows.append(len(tableau) - 1)

    n_art = len(artificial_rows)
    if n_art:
        for row in tableau:
            row[-1:-1] = [ZERO] * n_art
        for a, r in enumerate(artificial_rows):
            tableau[r][total + a] = ONE
            basis[r] = total + a
        cost = [ZERO] * total + [-ONE] * n_art
        status = _run(tableau, basis, cost)
        assert status == "optimal"
        phase1 = sum((cost[b] * tableau[r][-1] for r, b in enumerate(basis)), ZERO)
        if phase1 < 0:
            return "infeasible", None, None
        # drive artificials out of the basis; drop redundant rows
        r = 0
        while r < len(tableau):
            if basis[r] >= total:
                row = tableau[r]
                j = next((j for j in range(total) if row[j]), None)
                if j is None:
                    del tableau[r]
                    del basis[r]
                    continue
                _pivot(tableau, basis, r, j)
            r += 1
        for row in tableau:
            del row[total:total + n_art]

    cost = [ZERO] * total
    if objective is not None:
        for j, (k, sgn) in enumerate(columns):
            cost[j] = objective[k] * sgn
        status = _run(tableau, basis, cost)
        if status == "unbounded":
            return "unbounded", None, None

    values = [ZERO] * total
    for r, b in enumerate(basis):
        values[b] = tableau[r][-1]
    x = [ZERO] * n
    for j, (k, sgn) in enumerate(columns):
        if values[j]:
            x[k] += sgn * values[j]
    value = ZERO
    if objective is not None:
        value = sum((c * v for c, v in zip(objective, x) if c), ZERO)
    return "optimal", value, tuple(x)


def _pivot(tableau, basis, r, j):
    prow = tableau[r]
    piv = prow[j]
    if piv != 1:
        prow = [v / piv for v in prow]
        tableau[r] = prow
    nz = [(c, v) for c, v in enumerate(prow) if v]
    for i, row in enumerate(tableau):
        if i != r:
            f = row[j]
            if f:
                for c, v in nz:
                    row[c] -= f * v
    basis[r] = j


def _run(tableau, basis, cost) -> str:
    """Maximize cost.x from the current feasible basis with Bland's rule."""
    ncols = len(cost)
    while True:
        red = list(cost)
        for r, b in enumerate(basis):
            cb = cost[b]
            if cb:
                row = tableau[r]
                for j in range(ncols):
                    if row[j]:
                        red[j] -= cb * row[j]
        entering = next((j for j in range(ncols) if red[j] > 0), None)
        if entering is None:
            return "optimal"
        best = None
        for r, row in enumerate(tableau):
            a = row[entering]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[r] < basis[best[1]]):
                    best = (ratio, r)
        if best is None:
            return "unbounded"
        _pivot(tableau, basis, best[1], entering)
