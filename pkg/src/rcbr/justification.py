"""The justification game G_s^E.

Player I defends a strategy by announcing a belief in the relation together
with a finite set b carrying the belief; player II challenges with some
strategy in b, which I must defend next.  The first player to break the rules
loses; I wins by surviving the ply budget.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Optional, Union

from .elimination import PolyhedralRelation, as_relation, rat_of_relation
from .exact.ordinal import Ordinal
from .exact.rational import format_rational, parse_rational
from .game import Game, UnknownStrategy, other
from .hierarchy import Hierarchy, OrderPoint
from .measure import FiniteMeasure, MalformedMeasure, point_key, pushforward
from .ranked import RankedGame, run_ranked
from .response import find_justifying_belief, is_best_response
from .exact.lp import LinearSystem, lp_optimize

DEFAULT_BUDGET = 64


class StrategyUndefined(ValueError):
    pass


class StuckStrategy(RuntimeError):
    def __init__(self, line: tuple, reason: str):
        self.line = line
        super().__init__(f"{reason} after line {' '.join(map(str, line)) or '<start>'}")


@dataclass(frozen=True)
class JMoveI:
    belief: FiniteMeasure
    b: frozenset

    def __str__(self):
        mu = " ".join(f"{t}={format_rational(w)}" for t, w in self.belief.items())
        bs = " ".join(str(t) for t in sorted(self.b, key=point_key))
        return f"mu: {mu} ; b: {bs}"


@dataclass(frozen=True)
class JPosition:
    """``current`` is owned by ``owner``; I moves at even plies."""

    s0: Hashable
    player0: int
    current: Hashable
    owner: int
    history: tuple = ()
    ply: int = 0

    @property
    def side_to_move(self) -> str:
        return "I" if self.ply % 2 == 0 else "II"

    @property
    def last_I_move(self) -> Optional[JMoveI]:
        return self.history[-1] if self.history and self.ply % 2 == 1 else None

    def after_I(self, move: JMoveI) -> JPosition:
        return JPosition(self.s0, self.player0, self.current, self.owner,
                         self.history + (move,), self.ply + 1)

    def after_II(self, t) -> JPosition:
        return JPosition(self.s0, self.player0, t, other(self.owner),
                         self.history + (t,), self.ply + 1)


def start(s, player: int = 1) -> JPosition:
    return JPosition(s, player, s, player)


class FiniteArena:
    """Rules and elimination data for a Game or PolyhedralRelation."""

    def __init__(self, source: Union[Game, PolyhedralRelation]):
        self.source = source
        self.relation = as_relation(source)
        self.trace = rat_of_relation(self.relation)
        self._canonical: dict = {}
        self._legal: dict = {}

    @property
    def name(self) -> str:
        return getattr(self.source, "name", "relation")

    def strategies(self, player: int):
        return self.relation.strategies(player)

    def check_strategy(self, player: int, s):
        if s not in self.relation.strategies(player):
            raise UnknownStrategy(s, player)

    def order(self, player: int, s) -> int:
        return self.relation.index(player, s)

    def in_relation(self, player: int, s, mu: FiniteMeasure) -> bool:
        key = (player, s, mu)
        hit = self._legal.get(key)
        if hit is None:
            if isinstance(self.source, Game):
                try:
                    hit = is_best_response(self.source, player, s, mu)
                except UnknownStrategy:
                    hit = False
            else:
                hit = self.relation.contains(player, s, mu)
            self._legal[key] = hit
        return hit

    def is_legal_I(self, player: int, s, move) -> bool:
        if not isinstance(move, JMoveI):
            return False
        opp = set(self.relation.strategies(other(player)))
        return (move.b <= opp and set(move.belief.support) <= move.b
                and self.in_relation(player, s, move.belief))

    def has_legal_I(self, player: int, s) -> bool:
        return self._justify(player, s, self.relation.strategies(other(player))) is not None

    def _justify(self, player: int, s, restriction):
        if isinstance(self.source, Game):
            return find_justifying_belief(self.source, player, s, restriction)
        return self.relation.justify(player, s, restriction)

    def elimination_ordinal(self, player: int, s) -> Optional[Ordinal]:
        return self.trace.elimination_ordinal(player, s)

    def survives(self, player: int, s) -> bool:
        return s in self.trace.final.side(player)

    def canonical(self, player: int, s) -> FiniteMeasure:
        """The canonical justifying belief against the final rectangle."""
        key = (player, s)
        if key not in self._canonical:
            opp = self.trace.final.side(other(player))
            mu = self._justify(player, s, opp) if opp else None
            if mu is None:
                raise StrategyUndefined(f"{s} is not rationalizable for player {player}")
            self._canonical[key] = mu
        return self._canonical[key]

    def fallback(self, player: int, s) -> Optional[FiniteMeasure]:
        return self._justify(player, s, self.relation.strategies(other(player)))

    def random_legal_I(self, player: int, s, rng: random.Random) -> Optional[JMoveI]:
        """A random point of E(s): a random LP vertex, sometimes mixed with another."""
        system = self.relation.system(player, s)
        opp = self.relation.strategies(other(player))

        def vertex():
            obj = [rng.randint(-5, 5) for _ in range(system.n)]
            res = lp_optimize(LinearSystem(system.n, system.constraints, tuple(obj)))
            if res.status != "optimal":
                return None
            return FiniteMeasure({t: w for t, w in zip(opp, res.witness) if w})

        mu = vertex()
        if mu is None:
            return None
        if rng.random() < 0.5:
            nu = vertex()
            if nu is not None:
                mu = mu.mixture(Fraction(rng.randint(1, 3), 4), nu)
        extra = {t for t in opp if rng.random() < 0.3}
        return JMoveI(mu, frozenset(mu.support) | frozenset(extra))

    def describe_I(self, player: int, s) -> str:
        system = self.relation.system(player, s)
        opp = self.relation.strategies(other(player))
        rows = []
        for c in system.constraints:
            terms = " + ".join(f"{format_rational(a)}*{t}" for a, t in zip(c.coeffs, opp) if a)
            rows.append(f"  {terms or '0'} {c.rel} {format_rational(c.bound)}")
        return "\n".join(rows)


class RankedArena:
    """The ranked integer games, using the closed-form best-response test."""

    def __init__(self, rg: RankedGame):
        self.source = rg
        self.trace = run_ranked(rg)

    @property
    def name(self) -> str:
        return self.source.name

    def strategies(self, player: int):
        return None

    def check_strategy(self, player: int, s):
        if not isinstance(s, int) or s < 0:
            raise UnknownStrategy(s, player)

    def order(self, player: int, s) -> int:
        return s

    def _below(self, x: int, cap: int) -> list[int]:
        rank = self.source.psi(x)
        return [y for y in range(cap) if self.source.psi(y) < rank]

    def in_relation(self, player: int, x, mu: FiniteMeasure) -> bool:
        # x earns mu(ranks below x); the supremum over alternatives is 1
        rank = self.source.psi(x)
        return all(isinstance(y, int) and y >= 0 and self.source.psi(y) < rank for y in mu.support)

    def is_legal_I(self, player: int, x, move) -> bool:
        if not isinstance(move, JMoveI):
            return False
        return (all(isinstance(y, int) and y >= 0 for y in move.b)
                and set(move.belief.support) <= move.b and self.in_relation(player, x, move.belief))

    def _lowest(self) -> int:
        m = self.source.modulus
        return min(range(m), key=lambda r: self.source.psi(r))

    def has_legal_I(self, player: int, x) -> bool:
        return self.source.psi(self._lowest()) < self.source.psi(x)

    def elimination_ordinal(self, player: int, x) -> Optional[Ordinal]:
        return self.trace.elimination_ordinal(x)

    def survives(self, player: int, x) -> bool:
        return self.elimination_ordinal(player, x) is None

    def canonical(self, player: int, x):
        raise StrategyUndefined("no strategy of a ranked game is rationalizable")

    def fallback(self, player: int, x) -> Optional[FiniteMeasure]:
        if not self.has_legal_I(player, x):
            return None
        return FiniteMeasure({self._lowest(): 1})

    def random_legal_I(self, player: int, x, rng: random.Random) -> Optional[JMoveI]:
        cap = max(self.source.horizon, 2 * x + 2 * self.source.modulus)
        below = self._below(x, cap)
        if not below:
            return None
        support = rng.sample(below, min(len(below), rng.randint(1, 3)))
        raw = [rng.randint(1, 4) for _ in support]
        total = sum(raw)
        mu = FiniteMeasure({y: Fraction(w, total) for y, w in zip(support, raw)})
        extra = {rng.randrange(cap) for _ in range(rng.randint(0, 2))}
        return JMoveI(mu, frozenset(support) | frozenset(extra))

    def describe_I(self, player: int, x) -> str:
        return f"  every point of the support must rank below psi({x}) = {self.source.psi(x)}"


Arena = Union[FiniteArena, RankedArena]


def arena_for(source) -> Arena:
    if isinstance(source, (FiniteArena, RankedArena)):
        return source
    if isinstance(source, RankedGame):
        return RankedArena(source)
    return FiniteArena(source)


def legal_moves_I(arena: Arena, pos: JPosition) -> dict:
    """The polyhedron of legal beliefs; any finite b containing the support is admissible."""
    if pos.side_to_move != "I":
        raise ValueError("not I's turn")
    return {"player": pos.owner, "strategy": pos.current,
            "nonempty": arena.has_legal_I(pos.owner, pos.current),
            "rows": arena.describe_I(pos.owner, pos.current)}


def legal_moves_II(arena: Arena, pos: JPosition) -> frozenset:
    if pos.side_to_move != "II":
        raise ValueError("not II's turn")
    return pos.last_I_move.b


# ---- strategy objects -------------------------------------------------------

class CanonicalI:
    """Plays the canonical justifying belief of the current strategy with b = its support."""

    positional = True

    def __init__(self, arena: Arena):
        self.arena = arena

    def __call__(self, pos: JPosition) -> JMoveI:
        mu = self.arena.canonical(pos.owner, pos.current)
        return JMoveI(mu, frozenset(mu.support))


class FallbackI:
    """Some legal belief whenever one exists, ignoring survival."""

    positional = True

    def __init__(self, arena: Arena):
        self.arena = arena

    def __call__(self, pos: JPosition) -> Optional[JMoveI]:
        mu = self.arena.fallback(pos.owner, pos.current)
        return None if mu is None else JMoveI(mu, frozenset(mu.support))


class RandomI:
    positional = False

    def __init__(self, arena: Arena, rng: random.Random):
        self.arena, self.rng = arena, rng

    def __call__(self, pos: JPosition) -> Optional[JMoveI]:
        return self.arena.random_legal_I(pos.owner, pos.current, self.rng)


class DescentII:
    """Challenge with an element of b eliminated earliest (ties: strategy order)."""

    def __init__(self, arena: Arena):
        self.arena = arena

    def __call__(self, pos: JPosition):
        owner = other(pos.owner)
        b = legal_moves_II(self.arena, pos)

        def key(t):
            o = self.arena.elimination_ordinal(owner, t)
            return (o is None, o if o is not None else Ordinal(), self.arena.order(owner, t))

        return min(b, key=key)


class RandomII:
    def __init__(self, rng: random.Random, arena: Optional[Arena] = None):
        self.rng = rng
        self.arena = arena

    def __call__(self, pos: JPosition):
        b = sorted(pos.last_I_move.b, key=point_key)
        return self.rng.choice(b)


def synthesize_I(source, s, player: int = 1) -> CanonicalI:
    arena = arena_for(source)
    arena.check_strategy(player, s)
    if not arena.survives(player, s):
        raise StrategyUndefined(f"{s} is eliminated; I has no winning strategy")
    return CanonicalI(arena)


def synthesize_II(source, s, player: int = 1, strict: bool = True) -> DescentII:
    arena = arena_for(source)
    arena.check_strategy(player, s)
    if strict and arena.survives(player, s):
        raise StrategyUndefined(f"{s} survives elimination; II has no winning strategy")
    return DescentII(arena)


# ---- plays --------------------------------------------------------------------

@dataclass
class PlayRecord:
    arena_name: str
    s0: Hashable
    player0: int
    budget: int
    moves: list = field(default_factory=list)
    winner: str = "I"
    exhausted: bool = False
    reason: str = ""
    audit: list = field(default_factory=list)
    ordinals: list = field(default_factory=list)  # elimination ordinals of s0 and II's picks

    @property
    def plies(self) -> int:
        return len(self.moves)

    def descent_ok(self) -> bool:
        """Known ordinals strictly decrease along the play."""
        known = [o for o in self.ordinals if o is not None]
        if len(known) != len(self.ordinals):
            return False
        return all(b < a for a, b in zip(known, known[1:]))


def play(source, s, strat_I: Callable, strat_II: Callable,
         max_plies: int = DEFAULT_BUDGET, player: int = 1) -> PlayRecord:
    arena = arena_for(source)
    arena.check_strategy(player, s)
    pos = start(s, player)
    rec = PlayRecord(arena.name, s, player, max_plies)
    rec.ordinals.append(arena.elimination_ordinal(player, s))
    while pos.ply < max_plies:
        if pos.side_to_move == "I":
            move = strat_I(pos)
            if move is None:
                rec.winner = "II"
                rec.reason = ("I has no legal move" if not arena.has_legal_I(pos.owner, pos.current)
                              else "I resigned although a legal move existed")
                break
            rec.moves.append(move)
            if not arena.is_legal_I(pos.owner, pos.current, move):
                rec.winner = "II"
                rec.reason = "I played an illegal move"
                rec.audit.append(f"ply {pos.ply}: illegal move by I")
                break
            pos = pos.after_I(move)
        else:
            t = strat_II(pos)
            rec.moves.append(t)
            if t not in pos.last_I_move.b:
                rec.winner = "I"
                rec.reason = "II played outside b"
                rec.audit.append(f"ply {pos.ply}: illegal move by II")
                break
            rec.ordinals.append(arena.elimination_ordinal(other(pos.owner), t))
            pos = pos.after_II(t)
    else:
        rec.winner = "I"
        rec.exhausted = True
        rec.reason = f"I survived {max_plies} plies"
    rec.audit.extend(replay(arena, rec))
    return rec


def replay(source, rec: PlayRecord) -> list[str]:
    """Independently re-validate a transcript; returns discrepancies."""
    arena = arena_for(source)
    pos = start(rec.s0, rec.player0)
    problems = []
    loser = None
    for k, mv in enumerate(rec.moves):
        if pos.side_to_move == "I":
            if not arena.is_legal_I(pos.owner, pos.current, mv):
                loser = "I"
                if k != len(rec.moves) - 1:
                    problems.append(f"ply {k}: play continued after an illegal I move")
                break
            pos = pos.after_I(mv)
        else:
            if mv not in pos.last_I_move.b:
                loser = "II"
                if k != len(rec.moves) - 1:
                    problems.append(f"ply {k}: play continued after an illegal II move")
                break
            pos = pos.after_II(mv)
    if loser is None and pos.ply < rec.budget and pos.side_to_move == "I":
        if arena.has_legal_I(pos.owner, pos.current):
            if rec.winner == "II" and "resigned" not in rec.reason:
                problems.append("II credited with a win although I had a legal move")
        loser = "I"
    if loser is None:
        expected = "I"
    else:
        expected = "II" if loser == "I" else "I"
    if expected != rec.winner:
        problems.append(f"recorded winner {rec.winner}, replay gives {expected}")
    return problems


# ---- transcript text ---------------------------------------------------------

def format_transcript(rec: PlayRecord) -> str:
    out = [f"justification-game source={rec.arena_name} player={rec.player0} "
           f"strategy={rec.s0} budget={rec.budget}"]
    for k, mv in enumerate(rec.moves):
        out.append(f"ply {k} {'I' if k % 2 == 0 else 'II'} {mv}")
    how = "budget exhausted" if rec.exhausted else rec.reason
    out.append(f"result: {rec.winner} wins at ply {rec.plies} ({how})")
    return "\n".join(out) + "\n"


def parse_move_I(text: str, numeric: bool = False) -> JMoveI:
    """``mu: x=1/2 y=1/2 ; b: x y``."""
    conv = int if numeric else str
    try:
        mu_part, b_part = text.split(";")
        mu_part, b_part = mu_part.strip(), b_part.strip()
        if not mu_part.startswith("mu:") or not b_part.startswith("b:"):
            raise ValueError
        weights = {}
        for item in mu_part[3:].split():
            t, w = item.split("=")
            weights[conv(t)] = parse_rational(w)
        b = frozenset(conv(t) for t in b_part[2:].split())
        return JMoveI(FiniteMeasure(weights), b)
    except MalformedMeasure:
        raise
    except ValueError:
        raise ValueError(f"expected 'mu: t=w ... ; b: t ...', got {text!r}") from None


def parse_transcript(text: str, numeric: bool = False) -> PlayRecord:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    head = dict(w.split("=", 1) for w in lines[0].split()[1:])
    conv = int if numeric else str
    rec = PlayRecord(head["source"], conv(head["strategy"]), int(head["player"]),
                     int(head["budget"]))
    for ln in lines[1:]:
        if ln.startswith("result:"):
            words = ln.split()
            rec.winner = words[1]
            rec.exhausted = "budget exhausted" in ln
            rec.reason = ln.split("(", 1)[1].rstrip(")") if "(" in ln else ""
            continue
        _, _, side, rest = ln.split(" ", 3)
        rec.moves.append(parse_move_I(rest, numeric) if side == "I" else conv(rest))
    return rec


# ---- strategy to type ----------------------------------------------------------

def hierarchy_from_strategy(source, s, tau: Callable, depth: int = 8,
                            player: int = 1) -> Hierarchy:
    """Belief hierarchy read off an I-strategy.

    d^1 is tau's first belief nu; d^(k+1) pushes nu forward along
    t -> (t, first k levels of the residual strategy after II plays t).
    Every line through the announced sets b is checked to ``depth`` plies of I.
    """
    arena = arena_for(source)
    arena.check_strategy(player, s)
    memo: dict = {}
    positional = getattr(tau, "positional", False)

    def levels(pos: JPosition, k: int, line: tuple) -> tuple:
        key = (pos.owner, pos.current, k) if positional else None
        if key is not None and key in memo:
            return memo[key]
        move = tau(pos)
        if move is None:
            raise StuckStrategy(line, "strategy has no move")
        if not arena.is_legal_I(pos.owner, pos.current, move):
            raise StuckStrategy(line, "strategy plays an illegal move")
        nxt = pos.after_I(move)
        out = [pushforward(move.belief, lambda t: OrderPoint(t))]
        if k > 1:
            children = {t: levels(nxt.after_II(t), k - 1, line + (move, t))
                        for t in sorted(move.b, key=point_key)}
            for m in range(1, k):
                out.append(pushforward(move.belief,
                                       lambda t, m=m: OrderPoint(t, children[t][:m])))
        result = tuple(out)
        if key is not None:
            memo[key] = result
        return result

    return Hierarchy(player, levels(start(s, player), depth, ()))
