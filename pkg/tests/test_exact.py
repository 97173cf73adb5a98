from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st

from oracles import brute_feasible, brute_optimize, value_2x2
from rcbr.exact import (
    EQ, LE, LT, DimensionError, LinearSystem, Ordinal, OrdinalOverflow, constraint,
    format_rational, lp_feasible, lp_optimize, ordinal_cmp, ordinal_succ, parse_ordinal,
    parse_rational,
)

rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 1000)


# ---- rationals ---------------------------------------------------------------------

@given(rationals, rationals, rationals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == 0
    if a != 0:
        assert a * (1 / a) == 1


@given(rationals)
def test_rational_text_round_trip(q):
    assert parse_rational(format_rational(q)) == q
    assert parse_rational(format_rational(q, always_fraction=True)) == q


@given(st.integers(-10**30, 10**30), st.integers(1, 10**30))
def test_rationals_stay_reduced(p, q):
    r = parse_rational(f"{p}/{q}")
    assert r.denominator > 0
    assert gcd(abs(r.numerator), r.denominator) == 1


def test_rational_syntax():
    assert parse_rational("-3/6") == Fraction(-1, 2)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(1), always_fraction=True) == "1/1"
    for bad in ("1/0", "1.5", "", "--1", "1/-2", "x"):
        with pytest.raises(ValueError):
            parse_rational(bad)


# ---- ordinals ----------------------------------------------------------------------

def test_ordinal_examples():
    assert ordinal_succ(Ordinal.omega(1, 2)) == Ordinal.omega(1, 3)
    assert ordinal_cmp(Ordinal.omega(), Ordinal.of(5)) == ">"
    assert ordinal_cmp(Ordinal.omega(2), Ordinal.omega(1, 100)) == ">"
    assert ordinal_cmp(Ordinal.of(3), Ordinal((0, 3))) == "="


def test_ordinal_text():
    assert str(Ordinal.omega(1, 3)) == "w*1+3"
    assert str(Ordinal()) == "0"
    assert str(Ordinal((2, 0, 5))) == "w^2*2+5"
    assert parse_ordinal("w*1+3") == Ordinal.omega(1, 3)
    assert parse_ordinal("w") == Ordinal.omega(1, 0)
    assert parse_ordinal("w^4*2") == Ordinal((2, 0, 0, 0, 0))
    for bad in ("3+w", "w+w", "w^x", ""):
        with pytest.raises(ValueError):
            parse_ordinal(bad)
    with pytest.raises(OrdinalOverflow):
        parse_ordinal("w^5")


def test_ordinal_predicates():
    w3 = Ordinal.omega(1, 3)
    assert not w3.is_limit and not w3.is_finite and w3.finite_part == 3
    assert Ordinal.omega(2).is_limit and Ordinal().is_zero
    assert w3.limit_part() == Ordinal.omega(1) and w3.plus(2) == Ordinal.omega(1, 5)


ordinals = st.lists(st.integers(0, 4), min_size=0, max_size=5).map(lambda c: Ordinal(tuple(c)))


@given(ordinals, ordinals, ordinals)
def test_ordinal_order_properties(a, b, c):
    assert (ordinal_cmp(a, b) == "<") == (ordinal_cmp(b, a) == ">")
    if a <= b and b <= a:
        assert a == b
    if a <= b and b <= c:
        assert a <= c
    assert ordinal_succ(a) > a


@given(ordinals)
def test_ordinal_text_round_trip(a):
    assert parse_ordinal(str(a)) == a


# ---- linear programming --------------------------------------------------------------

def test_lp_examples():
    assert lp_feasible(LinearSystem.build(1, [((1,), ">=", 0), ((1,), "<=", 0)])) == (0,)
    half = LinearSystem.build(2, [((1, 1), "=", 1), ((1, 0), ">=", 0), ((0, 1), ">=", 0),
                                  ((3, -3), ">=", 0)])
    x = lp_feasible(half)
    assert half.satisfied_by(x) and x[0] >= Fraction(1, 2)
    empty = LinearSystem.build(2, [((1, 1), "=", 1), ((1, 0), ">=", 0), ((0, 1), ">=", 0),
                                   ((1, 0), ">", 1)])
    assert lp_feasible(empty) is None


def test_lp_optimize_examples():
    res = lp_optimize(LinearSystem.build(1, [((1,), "<=", Fraction(2, 3)), ((1,), ">=", 0)], (1,)))
    assert (res.status, res.optimum, res.witness) == ("optimal", Fraction(2, 3), (Fraction(2, 3),))
    assert lp_optimize(LinearSystem.build(1, [((1,), ">=", 0)], (1,))).status == "unbounded"
    infeasible = LinearSystem.build(1, [((1,), ">=", 1), ((1,), "<=", 0)], (1,))
    assert lp_optimize(infeasible).status == "infeasible"


def test_lp_zero_sum_value_example():
    # row player mixes (p_a, p_b, p_c); v <= payoff against each column
    A = [[2, -1], [-1, 2], [0, 0]]
    rows = [((1, 1, 1, 0), "=", 1)]
    rows += [(tuple(-1 if j == k else 0 for j in range(4)), "<=", 0) for k in range(3)]
    for col in range(2):
        rows.append((tuple(-A[r][col] for r in range(3)) + (1,), "<=", 0))
    res = lp_optimize(LinearSystem.build(4, rows, (0, 0, 0, 1)))
    assert res.optimum == value_2x2(2, -1, -1, 2) == Fraction(1, 2)


def test_lp_dimension_errors():
    with pytest.raises(DimensionError):
        lp_feasible(LinearSystem.build(2, [((1,), "<=", 0)]))
    with pytest.raises(DimensionError):
        lp_optimize(LinearSystem.build(1, [((1,), "<=", 0)], (1, 1)))
    with pytest.raises(ValueError):
        lp_optimize(LinearSystem.build(1, [((1,), "<", 0)], (1,)))
    with pytest.raises(ValueError):
        constraint((1,), "!=", 0)


small = st.integers(-3, 3).map(Fraction)


@st.composite
def systems(draw, strict=False):
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 6))
    rels = [LE, EQ, LT] if strict else [LE, LE, EQ]
    rows = []
    for _ in range(m):
        coeffs = tuple(draw(small) for _ in range(n))
        rows.append((coeffs, draw(st.sampled_from(rels)), draw(small)))
    return n, rows


@given(systems(), st.lists(small, min_size=3, max_size=3))
def test_lp_optimize_matches_vertex_enumeration(nrows, obj):
    n, rows = nrows
    objective = tuple(obj[:n])
    res = lp_optimize(LinearSystem.build(n, rows, objective))
    status, value = brute_optimize(n, rows, objective)
    assert res.status == status
    if status == "optimal":
        assert res.optimum == value
        assert LinearSystem.build(n, rows).satisfied_by(res.witness)
        assert sum(c * x for c, x in zip(objective, res.witness)) == value


@given(systems(strict=True))
def test_lp_feasible_matches_vertex_enumeration(nrows):
    n, rows = nrows
    system = LinearSystem.build(n, rows)
    x = lp_feasible(system)
    assert (x is not None) == brute_feasible(n, rows)
    if x is not None:
        assert system.satisfied_by(x)


@given(systems(strict=True))
def test_lp_is_deterministic(nrows):
    n, rows = nrows
    assert lp_feasible(LinearSystem.build(n, rows)) == lp_feasible(LinearSystem.build(n, rows))
