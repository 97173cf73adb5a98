"""Finite-depth belief hierarchies.

A level-k belief of player i is a measure over order-(k-1) points
``(t, d_j^1, ..., d_j^(k-1))``: an opponent strategy followed by the
opponent's first k-1 belief levels.  Order-0 points carry no beliefs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional, Union

from .elimination import EliminationTrace, PolyhedralRelation, as_relation
from .game import Game, UnknownStrategy, other
from .measure import FiniteMeasure, point_key, pushforward
from .response import find_justifying_belief, is_best_response


class MalformedHierarchy(ValueError):
    def __init__(self, message: str, path: tuple = ()):
        self.path = path
        where = "/".join(map(str, path)) or "<root>"
        super().__init__(f"{where}: {message}")


class OrderPoint:
    """An opponent strategy with a prefix of the opponent's belief levels."""

    __slots__ = ("strategy", "beliefs", "_hash", "_key")

    def __init__(self, strategy: Hashable, beliefs: Iterable[FiniteMeasure] = ()):
        self.strategy = strategy
        self.beliefs = tuple(beliefs)
        self._hash = hash((strategy, self.beliefs))
        self._key = None

    @property
    def order(self) -> int:
        return len(self.beliefs)

    def truncate(self) -> OrderPoint:
        return OrderPoint(self.strategy, self.beliefs[:-1])

    @property
    def sort_key(self):
        if self._key is None:
            self._key = (4, point_key(self.strategy), tuple(b.sort_key for b in self.beliefs))
        return self._key

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, OrderPoint):
            return NotImplemented
        return (self._hash == other._hash and self.strategy == other.strategy
                and self.beliefs == other.beliefs)

    def __repr__(self):
        return f"OrderPoint({self.strategy!r}, order={self.order})"


@dataclass(frozen=True)
class Hierarchy:
    """Levels d^1..d^depth of one player's beliefs."""

    player: int
    levels: tuple[FiniteMeasure, ...]

    @property
    def depth(self) -> int:
        return len(self.levels)

    def first_order(self) -> FiniteMeasure:
        """Marginal of d^1 on opponent strategies."""
        return pushforward(self.levels[0], lambda p: p.strategy)

    def prefix(self, n: int) -> Hierarchy:
        return Hierarchy(self.player, self.levels[:n])


def _check_shape(m: FiniteMeasure, order: int, path: tuple):
    for p in m.support:
        if not isinstance(p, OrderPoint):
            raise MalformedHierarchy(f"support point {p!r} is not an order point", path)
        if p.order != order:
            raise MalformedHierarchy(
                f"point of order {p.order} in a measure over order-{order} points", path)


class _Coherence:
    """Memoized hereditary-coherence checks; structures share subterms."""

    def __init__(self):
        self.seq: dict = {}
        self.measure: dict = {}

    def coherent(self, levels: tuple, path: tuple = ()) -> bool:
        hit = self.seq.get(levels)
        if hit is not None:
            return hit
        ok = True
        for k, m in enumerate(levels):
            _check_shape(m, k, path + (f"level {k + 1}",))
        for k in range(1, len(levels)):
            if pushforward(levels[k], OrderPoint.truncate) != levels[k - 1]:
                ok = False
                break
        self.seq[levels] = ok
        return ok

    def hereditary_measure(self, m: FiniteMeasure, path: tuple) -> bool:
        hit = self.measure.get(m)
        if hit is not None:
            return hit
        ok = True
        for p in m.support:
            sub = path + (str(p.strategy),)
            if not isinstance(p, OrderPoint):
                raise MalformedHierarchy(f"support point {p!r} is not an order point", sub)
            if not self.coherent(p.beliefs, sub):
                ok = False
                break
            if not all(self.hereditary_measure(b, sub + (f"level {k + 1}",))
                       for k, b in enumerate(p.beliefs)):
                ok = False
                break
        self.measure[m] = ok
        return ok

    def hereditary(self, levels: tuple, path: tuple = ()) -> bool:
        return self.coherent(levels, path) and all(
            self.hereditary_measure(m, path + (f"level {k + 1}",)) for k, m in enumerate(levels))


def check_coherent(h: Hierarchy) -> bool:
    return _Coherence().coherent(h.levels)


def check_hereditarily_coherent(h: Hierarchy) -> bool:
    return _Coherence().hereditary(h.levels)


Source = Union[Game, PolyhedralRelation]


def _in_relation(source: Source, player: int, s, mu: FiniteMeasure) -> bool:
    if isinstance(source, Game):
        return is_best_response(source, player, s, mu)
    return source.contains(player, s, mu)


def _rcbr_checker(source: Source, player: int, s):
    if isinstance(source, Game):
        source.index(player, s)
    coh = _Coherence()
    memo: dict = {}

    def rec(pl: int, strat, levels: tuple, k: int) -> bool:
        key = (pl, strat, levels, k)
        hit = memo.get(key)
        if hit is not None:
            return hit
        first = pushforward(levels[0], lambda p: p.strategy)
        if k == 1:
            try:
                ok = _in_relation(source, pl, strat, first)
            except UnknownStrategy:
                ok = False
        else:
            ok = rec(pl, strat, levels[:k - 1], k - 1) and all(
                rec(other(pl), p.strategy, p.beliefs, k - 1) for p in levels[k - 1].support)
        memo[key] = ok
        return ok

    def check(h: Hierarchy, n: int) -> bool:
        if n < 1 or n > h.depth:
            raise ValueError(f"level {n} outside 1..{h.depth}")
        return coh.hereditary(h.levels[:n]) and rec(player, s, h.levels[:n], n)

    return check


def check_rcbr_star(source: Source, player: int, s, h: Hierarchy, n: int) -> bool:
    """Whether (s, d^1..d^n) lies in the local RCBR set of order n."""
    return _rcbr_checker(source, player, s)(h, n)


def rcbr_star_levels(source: Source, player: int, s, h: Hierarchy) -> list[bool]:
    """check_rcbr_star at n = 1..depth, sharing work between levels."""
    check = _rcbr_checker(source, player, s)
    return [check(h, n) for n in range(1, h.depth + 1)]


@dataclass
class WitnessMap:
    """Canonical justifying beliefs and the hierarchies built from them."""

    depth: int
    beliefs: dict = field(default_factory=dict)       # (player, s) -> FiniteMeasure
    hierarchies: dict = field(default_factory=dict)   # (player, s) -> Hierarchy
    note: Optional[str] = None

    def __getitem__(self, key) -> Hierarchy:
        return self.hierarchies[key]

    def __len__(self):
        return len(self.hierarchies)


def lift_levels(belief_map: dict, depth: int) -> dict:
    """Hierarchies from a map (player, s) -> belief over opponent strategies.

    d^1(s) is belief_map[s] on order-0 points and d^(k+1)(s) is its
    pushforward under t -> (t, d_j^1(t), ..., d_j^k(t)).  Every opponent
    strategy in a support must itself be a key of ``belief_map``.
    """
    levels = {key: [] for key in belief_map}
    prefixes: dict = {}
    for k in range(depth):
        for key in belief_map:
            prefixes[(key, k)] = tuple(levels[key])
        for (player, s), mu in belief_map.items():
            j = other(player)

            def lift(t, j=j, k=k):
                try:
                    return OrderPoint(t, prefixes[((j, t), k)])
                except KeyError:
                    raise ValueError(f"belief of {s} charges {t}, which has no belief") from None

            levels[(player, s)].append(pushforward(mu, lift))
    return {key: Hierarchy(key[0], tuple(lv)) for key, lv in levels.items()}


def build_witness(source: Source, trace: EliminationTrace, depth: int = 8) -> WitnessMap:
    """Witness hierarchies for every strategy of the trace's final rectangle."""
    final = trace.final
    wm = WitnessMap(depth)
    if not final.side_1 or not final.side_2:
        wm.note = "empty final rectangle: nothing to witness"
        return wm
    rel = None if isinstance(source, Game) else as_relation(source)
    for player in (1, 2):
        opp = final.side(other(player))
        for s in source.sort_strategies(player, final.side(player)):
            if rel is None:
                mu = find_justifying_belief(source, player, s, opp)
            else:
                mu = rel.justify(player, s, opp)
            if mu is None:
                raise ValueError(f"{s} in the final rectangle has no justifying belief")
            wm.beliefs[(player, s)] = mu
    wm.hierarchies = lift_levels(wm.beliefs, depth)
    return wm


def graph_concentrated(wm: WitnessMap) -> bool:
    """Every level-(k+1) point is (t, opponent's built prefix at t) exactly."""
    for (player, s), h in wm.hierarchies.items():
        j = other(player)
        for k, m in enumerate(h.levels):
            for p in m.support:
                target = wm.hierarchies.get((j, p.strategy))
                if target is None or p.beliefs != target.levels[:k]:
                    return False
    return True


def lubin_lift(A: Iterable[tuple], mu: FiniteMeasure) -> FiniteMeasure:
    """Lift mu on X to a measure on A with X-marginal mu, using the least
    y in each fiber as the selection."""
    fibers: dict = {}
    for x, y in A:
        fibers.setdefault(x, []).append(y)
    missing = [x for x in mu.support if x not in fibers]
    if missing:
        raise ValueError(f"support points with empty fiber: {missing!r}")
    choice = {x: min(ys, key=point_key) for x, ys in fibers.items()}
    return pushforward(mu, lambda x: (x, choice[x]))
