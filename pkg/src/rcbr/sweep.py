"""Game corpora and the per-game checks behind the verification sweeps."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .elimination import CONCEPTS, eliminate, is_maximal, verify_trace
from .game import Game
from .hierarchy import (
    build_witness, check_hereditarily_coherent, graph_concentrated, rcbr_star_levels,
)
from .justification import (
    FallbackI, RandomI, RandomII, StrategyUndefined, arena_for, hierarchy_from_strategy, play,
    synthesize_I, synthesize_II,
)
from .response import (
    dominates, is_strictly_dominated, never_best_response, pearce_auxiliary_game, solve_zero_sum,
)

ROW_IDS = ("a", "b", "c", "d", "e")
COL_IDS = ("x", "y", "z", "u", "v")


def _game(name: str, size: int, flat_1: Sequence, flat_2: Sequence) -> Game:
    p1 = [list(flat_1[r * size:(r + 1) * size]) for r in range(size)]
    p2 = [list(flat_2[r * size:(r + 1) * size]) for r in range(size)]
    return Game.from_matrices(name, ROW_IDS[:size], COL_IDS[:size], p1, p2)


def exhaustive_corpus(size: int, values: Sequence[Fraction]) -> Iterator[Game]:
    """Every game whose entries are drawn from ``values``: |values|^(2 size^2) games."""
    cells = size * size
    mats = list(itertools.product(values, repeat=cells))
    for i, m1 in enumerate(mats):
        for j, m2 in enumerate(mats):
            yield _game(f"g{size}-{i}-{j}", size, m1, m2)


def corpus_size(size: int, values: Sequence) -> int:
    return len(values) ** (2 * size * size)


def sampled_corpus(size: int, values: Sequence[Fraction], count: int, seed: int) -> list[Game]:
    rng = random.Random(seed)
    cells = size * size
    out = []
    for k in range(count):
        m1 = [rng.choice(values) for _ in range(cells)]
        m2 = [rng.choice(values) for _ in range(cells)]
        out.append(_game(f"s{size}-{seed}-{k}", size, m1, m2))
    return out


def mixed_corpus(count: int, values: Sequence[Fraction], seed: int) -> list[Game]:
    """Half 2x2, half 3x3, interleaved."""
    half = count // 2
    twos = sampled_corpus(2, values, count - half, seed)
    threes = sampled_corpus(3, values, half, seed + 1)
    out = []
    for k in range(count):
        src = twos if k % 2 == 0 else threes
        if k // 2 < len(src):
            out.append(src[k // 2])
    return out


def parse_values(text: str) -> list[Fraction]:
    from .exact.rational import parse_rational
    vals = [parse_rational(v.strip()) for v in text.split(",") if v.strip()]
    if not vals:
        raise ValueError("empty value list")
    return sorted(set(vals))


# ---- per-game checks -----------------------------------------------------------

def check_fundamental(g: Game, depth: int = 8) -> list[str]:
    """All four concepts agree; the RAT trace audits; every survivor gets a
    witnessing hierarchy passing the RCBR check at every level."""
    problems = []
    traces = {c: eliminate(g, c) for c in CONCEPTS}
    finals = {c: (t.final.side_1, t.final.side_2) for c, t in traces.items()}
    if len(set(finals.values())) != 1:
        problems.append(f"{g.name}: final rectangles differ: {finals}")
    rat = traces["RAT"]
    problems += [f"{g.name}: {p}" for p in verify_trace(g, rat)]
    if not is_maximal(g, rat.final):
        problems.append(f"{g.name}: final rectangle not maximal")
    wm = build_witness(g, rat, depth)
    if wm.note:
        problems.append(f"{g.name}: {wm.note}")
    for (player, s), h in wm.hierarchies.items():
        levels = rcbr_star_levels(g, player, s, h)  # includes hereditary coherence
        if all(levels):
            continue
        if not check_hereditarily_coherent(h):
            problems.append(f"{g.name}: hierarchy of {player}:{s} not hereditarily coherent")
        else:
            problems.append(f"{g.name}: hierarchy of {player}:{s} fails at level "
                            f"{levels.index(False) + 1}")
    if wm.hierarchies and not graph_concentrated(wm):
        problems.append(f"{g.name}: witness map not graph-concentrated")
    return problems


def check_pearce(g: Game) -> list[str]:
    """Never-best-response iff strictly dominated iff positive auxiliary value."""
    problems = []
    for player in (1, 2):
        for s in g.strategies(player):
            nbr = never_best_response(g, player, s)
            sigma = is_strictly_dominated(g, player, s)
            if nbr != (sigma is not None):
                problems.append(f"{g.name}: {player}:{s} nbr={nbr} dominated={sigma is not None}")
            if sigma is not None and not dominates(g, player, sigma, s):
                problems.append(f"{g.name}: {player}:{s} dominance certificate fails")
            row, _, value = solve_zero_sum(pearce_auxiliary_game(g, player, s))
            if (value > 0) != nbr:
                problems.append(f"{g.name}: {player}:{s} auxiliary value {value} vs nbr={nbr}")
            if value > 0 and not dominates(g, player, row, s):
                problems.append(f"{g.name}: {player}:{s} equilibrium mix does not dominate")
    return problems


@dataclass
class GameStats:
    plays: int = 0
    survivors: int = 0
    eliminated: int = 0
    hierarchies: int = 0
    problems: list = field(default_factory=list)
    type_problems: list = field(default_factory=list)


def check_justification(g: Game, opponents: int = 100, budget: int = 64, seed: int = 0,
                        depth: int = 8, stats: GameStats | None = None) -> GameStats:
    """Winnability matches survival; descent certificates; strategy-to-type."""
    st = stats or GameStats()
    arena = arena_for(g)
    rng = random.Random(f"{g.name}/{seed}")
    wm = build_witness(g, arena.trace, depth)

    def bad(msg):
        st.problems.append(f"{g.name}: {msg}")

    for player in (1, 2):
        for s in g.strategies(player):
            survives = arena.survives(player, s)
            tag = f"{player}:{s}"
            try:
                strat_I = synthesize_I(arena, s, player)
                if not survives:
                    bad(f"synthesize_I defined on eliminated {tag}")
            except StrategyUndefined:
                strat_I = None
                if survives:
                    bad(f"synthesize_I undefined on survivor {tag}")
            try:
                synthesize_II(arena, s, player)
                if survives:
                    bad(f"synthesize_II defined on survivor {tag}")
            except StrategyUndefined:
                if not survives:
                    bad(f"synthesize_II undefined on eliminated {tag}")
            descent = synthesize_II(arena, s, player, strict=False)
            if survives:
                st.survivors += 1
                runs = [play(arena, s, strat_I, descent, budget, player)]
                runs += [play(arena, s, strat_I, RandomII(rng), budget, player)
                         for _ in range(opponents)]
                for rec in runs:
                    if rec.winner != "I" or not rec.exhausted:
                        bad(f"I lost on survivor {tag}: {rec.reason}")
                h = hierarchy_from_strategy(arena, s, strat_I, depth, player)
                st.hierarchies += 1
                if h != wm[(player, s)]:
                    st.type_problems.append(
                        f"{g.name}: strategy-to-type hierarchy differs from witness for {tag}")
            else:
                st.eliminated += 1
                runs = [play(arena, s, FallbackI(arena), descent, budget, player)]
                runs += [play(arena, s, RandomI(arena, rng), descent, budget, player)
                         for _ in range(opponents)]
                for rec in runs:
                    if rec.winner != "II":
                        bad(f"II lost on eliminated {tag}: {rec.reason}")
                    if not rec.descent_ok():
                        bad(f"ordinals do not descend on {tag}")
            for rec in runs:
                if rec.audit:
                    bad(f"audit on {tag}: {rec.audit}")
            st.plays += len(runs)
    return st


@dataclass
class SweepReport:
    games: int = 0
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def run_sweep(games: Iterable[Game], depth: int = 8) -> SweepReport:
    rep = SweepReport()
    for g in games:
        rep.games += 1
        rep.problems += check_fundamental(g, depth)
        rep.problems += check_pearce(g)
    return rep
