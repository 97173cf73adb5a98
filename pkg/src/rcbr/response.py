"""Best responses, strict dominance and the auxiliary zero-sum game.

All LP-backed queries are pure functions of the player's own payoff matrix
and index sets, so they are memoized on exactly that data.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .exact.lp import EQ, LE, LinearSystem, constraint, lp_feasible, lp_optimize
from .game import Game, Mixed, expected_payoff, other
from .measure import FiniteMeasure

ZERO = Fraction(0)
ONE = Fraction(1)


class NotZeroSum(ValueError):
    pass


@dataclass(frozen=True)
class BeliefPolyhedron:
    """Beliefs over the opponent's strategies (variables in list order) to
    which ``strategy`` is a best response within the stated restriction."""

    owner: int
    strategy: str
    opponents: tuple[str, ...]
    system: LinearSystem

    def belief_at(self, x) -> FiniteMeasure:
        return FiniteMeasure({t: w for t, w in zip(self.opponents, x) if w})


def _indices(g: Game, player: int, strats: Optional[Iterable[str]]) -> tuple[int, ...]:
    if strats is None:
        return tuple(range(len(g.strategies(player))))
    return tuple(sorted({g.index(player, s) for s in strats}))


def simplex_rows(n: int) -> list:
    rows = [constraint((ONE,) * n, EQ, ONE)]
    for k in range(n):
        rows.append(constraint(tuple(-ONE if j == k else ZERO for j in range(n)), LE, ZERO))
    return rows


def support_rows(n: int, allowed: Iterable[int]) -> list:
    allowed = set(allowed)
    return [constraint(tuple(ONE if j == k else ZERO for j in range(n)), EQ, ZERO)
            for k in range(n) if k not in allowed]


@lru_cache(maxsize=1 << 16)
def _polyhedron_system(mat, s: int, restriction, alternatives) -> LinearSystem:
    n = len(mat[0])
    rows = simplex_rows(n)
    for t in alternatives:
        if t != s:
            rows.append(constraint(tuple(mat[t][u] - mat[s][u] for u in range(n)), LE, ZERO))
    if restriction is not None:
        rows += support_rows(n, restriction)
    return LinearSystem(n, tuple(rows))


def belief_polyhedron(g: Game, player: int, s: str,
                      restriction: Optional[Iterable[str]] = None,
                      alternatives: Optional[Iterable[str]] = None) -> BeliefPolyhedron:
    j = other(player)
    mat = g.own_matrix(player)
    restr = None if restriction is None else _indices(g, j, restriction)
    system = _polyhedron_system(mat, g.index(player, s), restr, _indices(g, player, alternatives))
    return BeliefPolyhedron(player, s, g.strategies(j), system)


def is_best_response(g: Game, player: int, s: str, mu: FiniteMeasure,
                     alternatives: Optional[Iterable[str]] = None) -> bool:
    own = expected_payoff(g, player, s, mu)
    alts = g.strategies(player) if alternatives is None else alternatives
    return all(own >= expected_payoff(g, player, t, mu) for t in alts)


@lru_cache(maxsize=1 << 18)
def _justify(mat, s: int, restriction, alternatives):
    return lp_feasible(_polyhedron_system(mat, s, restriction, alternatives))


def find_justifying_belief(g: Game, player: int, s: str, support_restriction: Iterable[str],
                           alternatives: Optional[Iterable[str]] = None) -> Optional[FiniteMeasure]:
    """Canonical belief concentrated on ``support_restriction`` to which ``s``
    is a best response among ``alternatives`` (default: all own strategies)."""
    j = other(player)
    restr = _indices(g, j, support_restriction)
    if not restr:
        raise ValueError("empty support restriction")
    x = _justify(g.own_matrix(player), g.index(player, s), restr,
                 _indices(g, player, alternatives))
    if x is None:
        return None
    return FiniteMeasure({t: w for t, w in zip(g.strategies(j), x) if w})


@lru_cache(maxsize=1 << 18)
def _dominate(mat, s: int, mix: tuple[int, ...], cols: tuple[int, ...]):
    k = len(mix)
    n = k + 1  # mixture weights, then the margin
    rows = [constraint((ONE,) * k + (ZERO,), EQ, ONE)]
    for a in range(k):
        rows.append(constraint(tuple(-ONE if b == a else ZERO for b in range(n)), LE, ZERO))
    for t in cols:
        rows.append(constraint(tuple(-mat[r][t] for r in mix) + (ONE,), LE, -mat[s][t]))
    res = lp_optimize(LinearSystem(n, tuple(rows), (ZERO,) * k + (ONE,)))
    assert res.status == "optimal"
    if res.optimum <= 0:
        return None
    return res.witness[:k], res.optimum


def dominance_margin(g: Game, player: int, s: str, mix_support: Iterable[str],
                     opponent_set: Iterable[str]):
    """(mixture, min margin) when s is strictly dominated, else None."""
    mix = _indices(g, player, mix_support)
    cols = _indices(g, other(player), opponent_set)
    if not mix or not cols:
        raise ValueError("mix_support and opponent_set must be nonempty")
    found = _dominate(g.own_matrix(player), g.index(player, s), mix, cols)
    if found is None:
        return None
    x, margin = found
    own = g.strategies(player)
    return FiniteMeasure({own[r]: w for r, w in zip(mix, x) if w}), margin


def is_strictly_dominated(g: Game, player: int, s: str,
                          mix_support: Optional[Iterable[str]] = None,
                          opponent_set: Optional[Iterable[str]] = None) -> Optional[FiniteMeasure]:
    """A mixture over ``mix_support`` beating ``s`` strictly against every
    opponent strategy in ``opponent_set``, or None."""
    mix_support = g.strategies(player) if mix_support is None else mix_support
    opponent_set = g.strategies(other(player)) if opponent_set is None else opponent_set
    found = dominance_margin(g, player, s, mix_support, opponent_set)
    return None if found is None else found[0]


def dominates(g: Game, player: int, sigma: FiniteMeasure, s: str,
              opponent_set: Optional[Iterable[str]] = None) -> bool:
    """Entrywise exact check that sigma strictly beats s on every listed column."""
    cols = g.strategies(other(player)) if opponent_set is None else opponent_set
    return all(expected_payoff(g, player, sigma, t) > g.payoff(player, s, t) for t in cols)


def pearce_auxiliary_game(g: Game, player: int, s0: str) -> Game:
    """Zero-sum game of payoff margins over s0; rows are ``player``'s strategies."""
    mat = g.own_matrix(player)
    base = mat[g.index(player, s0)]
    rows = tuple(tuple(v - b for v, b in zip(row, base)) for row in mat)
    neg = tuple(tuple(-v for v in row) for row in rows)
    return Game(f"{g.name}-aux-{player}-{s0}", g.strategies(player),
                g.strategies(other(player)), rows, neg)


def solve_zero_sum(g: Game) -> tuple[FiniteMeasure, FiniteMeasure, Fraction]:
    """Optimal row mix, optimal column mix and the value, by LP duality."""
    if any(b != -a for ra, rb in zip(g.payoff_1, g.payoff_2) for a, b in zip(ra, rb)):
        raise NotZeroSum(f"{g.name} is not zero-sum")
    A = g.payoff_1
    m, n = len(A), len(A[0])
    # row player: max v s.t. v <= sum_i sigma_i A[i][j] for every column j
    rows = simplex_rows(m)
    rows = [constraint(r.coeffs + (ZERO,), r.rel, r.bound) for r in rows]
    for j in range(n):
        rows.append(constraint(tuple(-A[i][j] for i in range(m)) + (ONE,), LE, ZERO))
    row_res = lp_optimize(LinearSystem(m + 1, tuple(rows), (ZERO,) * m + (ONE,)))
    # column player: min w s.t. sum_j tau_j A[i][j] <= w for every row i
    cols = simplex_rows(n)
    cols = [constraint(r.coeffs + (ZERO,), r.rel, r.bound) for r in cols]
    for i in range(m):
        cols.append(constraint(tuple(A[i][j] for j in range(n)) + (-ONE,), LE, ZERO))
    col_res = lp_optimize(LinearSystem(n + 1, tuple(cols), (ZERO,) * n + (-ONE,)))
    assert row_res.status == col_res.status == "optimal"
    value = row_res.optimum
    if -col_res.optimum != value:
        raise ArithmeticError("primal and dual values disagree")
    sigma = FiniteMeasure({s: w for s, w in zip(g.strategies_1, row_res.witness[:m]) if w})
    tau = FiniteMeasure({t: w for t, w in zip(g.strategies_2, col_res.witness[:n]) if w})
    return sigma, tau, value


def never_best_response(g: Game, player: int, s: str) -> bool:
    return find_justifying_belief(g, player, s, g.strategies(other(player))) is None


__all__ = [
    "BeliefPolyhedron", "NotZeroSum", "Mixed", "belief_polyhedron", "dominance_margin",
    "dominates", "find_justifying_belief", "is_best_response", "is_strictly_dominated",
    "never_best_response", "pearce_auxiliary_game", "simplex_rows", "solve_zero_sum",
    "support_rows",
]
