import random
from fractions import Fraction

import pytest

from rcbr.elimination import eliminate
from rcbr.hierarchy import build_witness, check_hereditarily_coherent, rcbr_star_levels
from rcbr.justification import (
    DescentII, FallbackI, JMoveI, RandomI, RandomII, StrategyUndefined, StuckStrategy,
    arena_for, format_transcript, hierarchy_from_strategy, legal_moves_I, legal_moves_II,
    parse_transcript, play, replay, start, synthesize_I, synthesize_II,
)
from rcbr.measure import FiniteMeasure, dirac
from rcbr.ranked import RankedGame

HALF = Fraction(1, 2)


def test_legal_moves_pd(pd):
    arena = arena_for(pd)
    assert not legal_moves_I(arena, start("C"))["nonempty"]
    assert legal_moves_I(arena, start("D"))["nonempty"]
    move = JMoveI(dirac("D"), frozenset({"D"}))
    assert arena.is_legal_I(1, "D", move)
    assert legal_moves_II(arena, start("D").after_I(move)) == {"D"}
    with pytest.raises(ValueError):
        legal_moves_II(arena, start("D"))


def test_support_must_sit_inside_b(pd):
    arena = arena_for(pd)
    assert not arena.is_legal_I(1, "D", JMoveI(dirac("D"), frozenset({"C"})))
    assert arena.is_legal_I(1, "D", JMoveI(dirac("D"), frozenset({"C", "D"})))


def test_survivor_loops_forever(pd, pennies, cascade):
    for g, s in ((pd, "D"), (pennies, "H"), (cascade, "a")):
        rec = play(g, s, synthesize_I(g, s), synthesize_II(g, s, strict=False), max_plies=120)
        assert rec.winner == "I" and rec.exhausted and rec.plies == 120
        assert rec.audit == []
    rec = play(cascade, "a", synthesize_I(cascade, "a"), RandomII(random.Random(1)), max_plies=20)
    assert {str(m) for m in rec.moves[0::4]} == {"mu: x=1 ; b: x"}
    assert set(rec.moves[1::4]) == {"x"} and set(rec.moves[3::4]) == {"a"}


def test_eliminated_strategies_lose(pd, cascade):
    rec = play(pd, "C", FallbackI(arena_for(pd)), synthesize_II(pd, "C"))
    assert rec.winner == "II" and rec.plies == 0 and rec.reason == "I has no legal move"
    rec = play(cascade, "b", FallbackI(arena_for(cascade)), synthesize_II(cascade, "b"))
    assert rec.winner == "II" and rec.plies <= 2
    assert rec.moves[1] == "y" and rec.descent_ok()


def test_synthesis_is_partial(pd):
    with pytest.raises(StrategyUndefined):
        synthesize_I(pd, "C")
    with pytest.raises(StrategyUndefined):
        synthesize_II(pd, "D")


def test_random_opponents_cannot_rescue_eliminated_strategies(cascade):
    arena = arena_for(cascade)
    for seed in range(30):
        rec = play(cascade, "b", RandomI(arena, random.Random(seed)), DescentII(arena))
        assert rec.winner == "II" and rec.descent_ok() and rec.audit == []


def test_ranked_descent_is_short():
    rg = RankedGame(1, (0,), 32)
    arena = arena_for(rg)
    for seed in range(40):
        rec = play(rg, 3, RandomI(arena, random.Random(seed)), DescentII(arena))
        assert rec.winner == "II" and rec.descent_ok()
        assert len(rec.moves[1::2]) <= 4


def test_illegal_moves_lose_for_the_emitter(pd):
    bad_I = lambda pos: JMoveI(dirac("C"), frozenset({"D"}))
    rec = play(pd, "D", bad_I, DescentII(arena_for(pd)))
    assert rec.winner == "II" and rec.audit[0].startswith("ply 0")
    bad_II = lambda pos: "C"
    rec = play(pd, "D", synthesize_I(pd, "D"), bad_II)
    assert rec.winner == "I" and "ply 1" in rec.audit[0]


def test_transcript_round_trip(cascade):
    rec = play(cascade, "b", FallbackI(arena_for(cascade)), synthesize_II(cascade, "b"))
    text = format_transcript(rec)
    assert text.startswith("justification-game source=cascade player=1 strategy=b budget=64\n")
    back = parse_transcript(text)
    assert format_transcript(back) == text
    assert replay(cascade, back) == []
    back.winner = "I"
    assert replay(cascade, back) != []


def test_ranked_transcript_round_trip():
    rg = RankedGame(2, (0, 1), 64, "transfinite")
    arena = arena_for(rg)
    rec = play(rg, 7, RandomI(arena, random.Random(3)), DescentII(arena))
    back = parse_transcript(format_transcript(rec), numeric=True)
    assert back.moves == rec.moves and replay(rg, back) == []


@pytest.mark.parametrize("name", ["pd", "cascade", "pennies"])
def test_strategy_to_type_matches_witness(name, request):
    g = request.getfixturevalue(name)
    wm = build_witness(g, eliminate(g), depth=6)
    for (player, s), h in wm.hierarchies.items():
        assert hierarchy_from_strategy(g, s, synthesize_I(g, s, player), 6, player) == h


def test_non_canonical_first_move(pennies):
    canon = synthesize_I(pennies, "H")
    mixed = FiniteMeasure({"H": HALF, "T": HALF})
    first = canon(start("H"))
    assert first.belief != mixed

    def tau(pos):
        if pos.ply == 0:
            return JMoveI(mixed, frozenset(mixed.support))
        return canon(pos)

    h = hierarchy_from_strategy(pennies, "H", tau, 5)
    assert h != hierarchy_from_strategy(pennies, "H", canon, 5)
    assert check_hereditarily_coherent(h)
    assert rcbr_star_levels(pennies, 1, "H", h) == [True] * 5


def test_stuck_strategy_reports_the_line(cascade):
    with pytest.raises(StuckStrategy) as exc:
        hierarchy_from_strategy(cascade, "b", FallbackI(arena_for(cascade)), 3)
    assert exc.value.line[-1] == "y"
