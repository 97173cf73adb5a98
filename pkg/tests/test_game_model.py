from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gamegen import games, measures
from oracles import brute_expected
from rcbr.game import (
    Game, GameFormatError, Rectangle, UnknownStrategy, emit_game, expected_payoff, parse_game,
)
from rcbr.measure import (
    FiniteMeasure, MalformedMeasure, dirac, is_concentrated, marginal, pushforward,
)

CASCADE = """\
game cascade
strategies 1 a b
strategies 2 x y
payoffs 1
1 0
0 2
payoffs 2
1 0
1 0
"""


def test_expected_payoff_examples(pd, cascade):
    assert expected_payoff(pd, 1, "D", dirac("C")) == 3
    mu = FiniteMeasure({"x": Fraction(1, 3), "y": Fraction(2, 3)})
    assert expected_payoff(cascade, 1, "b", mu) == Fraction(4, 3)


@given(games())
def test_uniform_expectation_is_mean(g):
    for player in (1, 2):
        own = FiniteMeasure({s: Fraction(1, len(g.strategies(player)))
                             for s in g.strategies(player)})
        opp = FiniteMeasure({t: Fraction(1, len(g.strategies(3 - player)))
                             for t in g.strategies(3 - player)})
        mat = g.payoff_1 if player == 1 else g.payoff_2
        entries = [v for row in mat for v in row]
        assert expected_payoff(g, player, own, opp) == sum(entries) / len(entries)


@given(st.data())
def test_expected_payoff_matches_oracle(data):
    g = data.draw(games())
    mu = data.draw(measures(g.strategies_1))
    nu = data.draw(measures(g.strategies_2))
    w1 = [mu[s] for s in g.strategies_1]
    w2 = [nu[t] for t in g.strategies_2]
    assert expected_payoff(g, 1, mu, nu) == brute_expected(g.payoff_1, w1, w2)
    assert expected_payoff(g, 2, nu, mu) == brute_expected(g.payoff_2, w1, w2)


@given(st.data())
def test_bilinearity(data):
    g = data.draw(games())
    mu = data.draw(measures(g.strategies_2))
    nu = data.draw(measures(g.strategies_2))
    alpha = data.draw(st.fractions(0, 1, max_denominator=20))
    s = data.draw(st.sampled_from(g.strategies_1))
    mix = mu.mixture(alpha, nu)
    assert expected_payoff(g, 1, s, mix) == (alpha * expected_payoff(g, 1, s, mu)
                                              + (1 - alpha) * expected_payoff(g, 1, s, nu))


def test_expected_payoff_errors(pd):
    with pytest.raises(UnknownStrategy):
        expected_payoff(pd, 1, "Z", "C")
    with pytest.raises(UnknownStrategy):
        expected_payoff(pd, 1, "C", dirac("Q"))
    with pytest.raises(MalformedMeasure):
        expected_payoff(pd, 1, "C", 3)


def test_measure_examples():
    assert pushforward(FiniteMeasure({0: Fraction(1, 2), 1: Fraction(1, 2)}), lambda p: "k") == dirac("k")
    m = FiniteMeasure({("a", "x"): Fraction(1, 4), ("a", "y"): Fraction(1, 4),
                       ("b", "x"): Fraction(1, 2)})
    assert marginal(m, 0) == FiniteMeasure({"a": Fraction(1, 2), "b": Fraction(1, 2)})
    m = FiniteMeasure({"x": Fraction(2, 3), "y": Fraction(1, 3)})
    assert not is_concentrated(m, {"x"})
    assert is_concentrated(m, {"x", "y", "z"})


def test_malformed_measures():
    with pytest.raises(MalformedMeasure):
        FiniteMeasure({"x": Fraction(1, 2)})
    with pytest.raises(MalformedMeasure):
        FiniteMeasure({"x": 0, "y": 1})
    with pytest.raises(MalformedMeasure):
        FiniteMeasure({"x": Fraction(3, 2), "y": Fraction(-1, 2)})
    with pytest.raises(MalformedMeasure):
        FiniteMeasure.from_raw(["y", "x"], [Fraction(1, 2), Fraction(1, 2)])
    with pytest.raises(MalformedMeasure):
        FiniteMeasure.from_raw(["x", "x"], [Fraction(1, 2), Fraction(1, 2)])


def test_support_order_is_natural():
    m = FiniteMeasure({"s10": Fraction(1, 2), "s9": Fraction(1, 4), "s1": Fraction(1, 4)})
    assert m.support == ("s1", "s9", "s10")
    assert FiniteMeasure({10: Fraction(1, 2), 9: Fraction(1, 2)}).support == (9, 10)


@given(st.data())
def test_normal_form_ignores_construction_order(data):
    pts = ["x", "y", "z", "w10", "w9"]
    m = data.draw(measures(pts))
    shuffled = data.draw(st.permutations(list(m.items())))
    again = FiniteMeasure(dict(shuffled))
    assert again == m and hash(again) == hash(m) and again.support == m.support


@given(st.data())
def test_graph_lift_identity(data):
    m = data.draw(measures(range(6)))
    table = data.draw(st.lists(st.integers(0, 3), min_size=6, max_size=6))
    lifted = pushforward(m, lambda t: (t, table[t]))
    assert marginal(lifted, 0) == m


@given(st.data())
def test_concentration_is_monotone(data):
    m = data.draw(measures(range(6)))
    B = set(data.draw(st.lists(st.integers(0, 5))))
    C = B | set(data.draw(st.lists(st.integers(0, 8))))
    if is_concentrated(m, B):
        assert is_concentrated(m, C)


def test_parse_cascade():
    g = parse_game(CASCADE)
    assert g.name == "cascade" and g.strategies_1 == ("a", "b")
    assert g.payoff_1 == ((1, 0), (0, 2)) and g.payoff_2 == ((1, 0), (1, 0))


@given(games(low=-5, high=5))
def test_emit_parse_round_trip(g):
    assert parse_game(emit_game(g)) == g


def test_emit_parse_fractions():
    g = Game.from_matrices("q", "ab", "xyz", [[Fraction(1, 3), -2, 0], [5, Fraction(-7, 2), 1]],
                           [[0, 0, 0], [1, 1, Fraction(9, 4)]])
    assert parse_game(emit_game(g)) == g


@pytest.mark.parametrize("text, line, fragment", [
    (CASCADE.replace("0 2\n", "0 2 7\n"), 6, "shape mismatch"),
    (CASCADE.replace("1 0\n1 0\n", "1 0\n"), 7, "shape mismatch"),
    (CASCADE.replace("strategies 2 x y", "strategies 2 x x"), 3, "duplicate"),
    (CASCADE.replace("0 2\n", "0 two\n"), 6, "not a rational"),
    (CASCADE.replace("game cascade", "gme cascade"), 1, "unexpected"),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(GameFormatError) as exc:
        parse_game(text)
    assert exc.value.line == line and fragment in str(exc.value)


def test_rectangle():
    r = Rectangle.of({"a"}, {"x", "y"})
    assert r <= Rectangle.of({"a", "b"}, {"x", "y"})
    assert not Rectangle.of({"a", "b"}, {"x"}) <= r
    assert r.replace(1, ()).is_empty
