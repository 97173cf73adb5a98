"""Acceptance criteria 1-7, each reported as one PASS/FAIL line in the summary."""
import random
import time
from fractions import Fraction

import pytest

from conftest import ACCEPTANCE
from gamegen import random_game, random_measure
from oracles import rank
from rcbr.elimination import eliminate
from rcbr.exact import Ordinal
from rcbr.hierarchy import (
    Hierarchy, MalformedHierarchy, OrderPoint, check_rcbr_star, lift_levels, lubin_lift,
)
from rcbr.measure import FiniteMeasure, is_concentrated, marginal, pushforward
from rcbr.ranked import RankedGame, run_ranked
from rcbr.response import find_justifying_belief
from rcbr.sweep import (
    GameStats, check_fundamental, check_justification, check_pearce, corpus_size,
    exhaustive_corpus, mixed_corpus, parse_values, sampled_corpus,
)

VALUES = parse_values("0,1,2")
SEED = 0
DEPTH = 8


def record(k, ok, detail):
    ACCEPTANCE[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="module")
def sweep():
    """One pass over the 2x2 and 3x3 corpora serving criteria 1 and 2."""
    fund, pearce, games = [], [], 0
    start = time.perf_counter()
    corpus = [exhaustive_corpus(2, VALUES), sampled_corpus(3, VALUES, 2000, SEED)]
    for source in corpus:
        for g in source:
            games += 1
            fund += check_fundamental(g, DEPTH)
            pearce += check_pearce(g)
    return games, fund, pearce, time.perf_counter() - start


@pytest.fixture(scope="module")
def justification_run():
    stats = GameStats()
    games = mixed_corpus(500, VALUES, SEED)
    start = time.perf_counter()
    for g in games:
        check_justification(g, opponents=100, budget=64, seed=SEED, depth=DEPTH, stats=stats)
    return len(games), stats, time.perf_counter() - start


def test_criterion_1_fundamental_theorem_sweep(sweep):
    games, fund, _, secs = sweep
    expected = corpus_size(2, VALUES) + 2000
    ok = games == expected and not fund
    record(1, ok, f"{games} games, {len(fund)} problems, depth {DEPTH}, {secs:.0f}s")
    assert games == expected
    assert not fund, fund[:10]


def test_criterion_2_pearce_equivalence(sweep):
    games, _, pearce, _ = sweep
    record(2, not pearce, f"{games} games, {len(pearce)} problems")
    assert not pearce, pearce[:10]


def _closed_form(m, coeffs, horizon, a, n):
    return [k for k in range(horizon) if rank(k, m, coeffs) >= (a, n)]


def test_criterion_3_ranked_closed_form():
    start = time.perf_counter()
    mismatches, checked = [], 0
    convergence = {}
    for m, coeffs, horizon in ((1, (0,), 32), (2, (0, 1), 64)):
        trace = run_ranked(RankedGame(m, coeffs, horizon))
        convergence[m] = trace.convergence_ordinal
        # every gamma <= w*2: w*a + n with a < 2, then w*2 itself
        span = horizon // m + 2
        gammas = [(a, n) for a in (0, 1) for n in range(span)] + [(2, 0)]
        for a, n in gammas:
            checked += 1
            gamma = Ordinal.omega(a, n)
            # past the family bound the trace sits at its fixpoint
            if gamma > trace.game.bound:
                got = trace.stages[-1].survivors.enumerate(horizon)
            else:
                got = trace.enumerate(gamma)
            if got != _closed_form(m, coeffs, horizon, a, n):
                mismatches.append((m, a, n))
    secs = time.perf_counter() - start
    conv_ok = convergence == {1: Ordinal.omega(1), 2: Ordinal.omega(2)}
    ok = not mismatches and conv_ok and secs < 5
    record(3, ok, f"{checked} stage sets, {len(mismatches)} mismatches, convergence "
                  f"{convergence[1]} and {convergence[2]}, {secs:.2f}s")
    assert not mismatches
    assert conv_ok
    assert secs < 5


def test_criterion_4_justification_game(justification_run):
    games, stats, secs = justification_run
    ok = not stats.problems and stats.survivors > 0 and stats.eliminated > 0
    record(4, ok, f"{games} games, {stats.survivors} survivors, {stats.eliminated} eliminated, "
                  f"{stats.plays} plays, {len(stats.problems)} problems, {secs:.0f}s")
    assert not stats.problems, stats.problems[:10]
    assert stats.survivors and stats.eliminated


def test_criterion_5_strategy_to_type(justification_run):
    _, stats, _ = justification_run
    ok = not stats.type_problems and stats.hierarchies == stats.survivors
    record(5, ok, f"{stats.hierarchies} hierarchies compared, {len(stats.type_problems)} differ")
    assert not stats.type_problems, stats.type_problems[:10]
    assert stats.hierarchies == stats.survivors


def _random_lift_instance(rng):
    xs = list(range(rng.randint(1, 8)))
    ys = list(range(rng.randint(1, 6)))
    A = {(x, rng.choice(ys)) for x in xs}  # every x gets a fiber
    A |= {(rng.choice(xs), rng.choice(ys)) for _ in range(rng.randint(0, 12))}
    pts = sorted({x for x, _ in A})
    return sorted(A), random_measure(rng, pts)


def test_criterion_6_lubin_lift():
    rng = random.Random(SEED)
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        A, mu = _random_lift_instance(rng)
        nu = lubin_lift(A, mu)
        if marginal(nu, 0) != mu or not is_concentrated(nu, set(A)):
            bad += 1
    secs = time.perf_counter() - start
    ok = bad == 0 and secs < 5
    record(6, ok, f"1000 relations, {bad} failures, {secs:.2f}s")
    assert bad == 0
    assert secs < 5


# ---- criterion 7: mutation suite ------------------------------------------------

MUT_DEPTH = 4


def _belief_map(g, rng):
    """Beliefs justifying each strategy against a random sub-rectangle when possible."""
    beliefs = {}
    for player in (1, 2):
        opp = g.strategies(3 - player)
        for s in g.strategies(player):
            sub = rng.sample(opp, rng.randint(1, len(opp)))
            mu = find_justifying_belief(g, player, s, sub) if rng.random() < 0.7 else None
            beliefs[(player, s)] = mu if mu is not None else random_measure(rng, opp)
    return beliefs


def _reweight(m: FiniteMeasure, rng) -> FiniteMeasure:
    raw = {p: rng.randint(1, 4) for p in m.support}
    total = sum(raw.values())
    return FiniteMeasure({p: Fraction(w, total) for p, w in raw.items()})


def _mutate(g, rng, beliefs, hs):
    """Returns (player, strategy, hierarchy) after one random mutation."""
    key = rng.choice(sorted(hs, key=str))
    player, s = key
    h = hs[key]
    kind = rng.randrange(5)
    if kind == 0:  # reattach the hierarchy to another strategy of the same player
        return player, rng.choice(g.strategies(player)), h
    if kind == 1:  # perturb one opponent's belief and relift everything
        changed = dict(beliefs)
        victim = rng.choice(sorted(changed, key=str))
        changed[victim] = random_measure(rng, g.strategies(3 - victim[0]))
        return player, s, lift_levels(changed, MUT_DEPTH)[key]
    if kind == 2:  # retarget one support point of one level
        k = rng.randrange(h.depth)
        levels = list(h.levels)
        pts = list(levels[k].support)
        old = rng.choice(pts)
        new = OrderPoint(rng.choice(g.strategies(3 - player)), old.beliefs)
        levels[k] = pushforward(levels[k], lambda p: new if p == old else p)
        return player, s, Hierarchy(player, tuple(levels))
    if kind == 3:  # splice levels from another hierarchy of the same player
        donor = hs[rng.choice([k2 for k2 in sorted(hs, key=str) if k2[0] == player])]
        cut = rng.randint(1, h.depth - 1)
        return player, s, Hierarchy(player, h.levels[:cut] + donor.levels[cut:])
    # reweight the top level only, or swap two levels
    levels = list(h.levels)
    if rng.random() < 0.5:
        levels[-1] = _reweight(levels[-1], rng)
    else:
        i, j = rng.sample(range(h.depth), 2)
        levels[i], levels[j] = levels[j], levels[i]
    return player, s, Hierarchy(player, tuple(levels))


def test_criterion_7_mutation_soundness():
    rng = random.Random(SEED)
    target = 1000
    passing = generated = deep = rejected_malformed = 0
    violations = []
    while passing < target and generated < 50 * target:
        g = random_game(rng, rng.randint(2, 3), rng.randint(2, 3), (0, 1, 2, 3), f"m{generated}")
        trace = eliminate(g)
        beliefs = _belief_map(g, rng)
        hs = lift_levels(beliefs, MUT_DEPTH)
        player, s, h = _mutate(g, rng, beliefs, hs)
        generated += 1
        passed_any = False
        for n in range(1, MUT_DEPTH + 1):
            try:
                ok = check_rcbr_star(g, player, s, h, n)
            except MalformedHierarchy:
                rejected_malformed += 1
                break
            if not ok:
                continue
            passed_any = True
            deep += n >= 2
            if s not in trace.stage_rectangle(n).side(player):
                violations.append(f"{g.name}: {player}:{s} passes level {n} but is eliminated")
        passing += passed_any
    ok = passing >= target and not violations and deep > 0
    record(7, ok, f"{passing} passing mutants of {generated} generated, {deep} passes at "
                  f"level >= 2, {rejected_malformed} malformed, {len(violations)} violations")
    assert not violations, violations[:10]
    assert passing >= target and deep > 0
