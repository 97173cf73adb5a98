"""Two-player strategic-form games with exact payoffs and their text format."""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .exact.rational import format_rational, parse_rational
from .measure import FiniteMeasure, MalformedMeasure

IDENT_RE = re.compile(r"^[A-Za-z0-9_.\-]+$")

Mixed = Union[str, FiniteMeasure]


class GameFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownStrategy(KeyError):
    def __str__(self):
        return f"unknown strategy {self.args[0]!r} for player {self.args[1]}"


def other(player: int) -> int:
    return 3 - player


@dataclass(frozen=True)
class Game:
    """Payoff matrices are indexed [strategy of player 1][strategy of player 2]."""

    name: str
    strategies_1: tuple[str, ...]
    strategies_2: tuple[str, ...]
    payoff_1: tuple[tuple[Fraction, ...], ...]
    payoff_2: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        for player, strats in ((1, self.strategies_1), (2, self.strategies_2)):
            if not strats:
                raise ValueError(f"player {player} has no strategies")
            if len(set(strats)) != len(strats):
                raise ValueError(f"duplicate strategy identifier for player {player}")
        for player, mat in ((1, self.payoff_1), (2, self.payoff_2)):
            if len(mat) != len(self.strategies_1) or any(
                    len(row) != len(self.strategies_2) for row in mat):
                raise ValueError(
                    f"payoff matrix of player {player} is not "
                    f"{len(self.strategies_1)}x{len(self.strategies_2)}")
        object.__setattr__(self, "_index", (
            {s: k for k, s in enumerate(self.strategies_1)},
            {s: k for k, s in enumerate(self.strategies_2)},
        ))

    @classmethod
    def from_matrices(cls, name: str, strategies_1: Sequence[str], strategies_2: Sequence[str],
                      payoff_1, payoff_2) -> Game:
        conv = lambda mat: tuple(tuple(Fraction(v) for v in row) for row in mat)  # noqa: E731
        return cls(name, tuple(strategies_1), tuple(strategies_2), conv(payoff_1), conv(payoff_2))

    def strategies(self, player: int) -> tuple[str, ...]:
        return self.strategies_1 if player == 1 else self.strategies_2

    def index(self, player: int, s: str) -> int:
        try:
            return self._index[player - 1][s]
        except KeyError:
            raise UnknownStrategy(s, player) from None

    def payoff(self, player: int, own: str, opp: str) -> Fraction:
        """pi_player(own, opp), each strategy belonging to its own player."""
        if player == 1:
            return self.payoff_1[self.index(1, own)][self.index(2, opp)]
        return self.payoff_2[self.index(1, opp)][self.index(2, own)]

    def own_matrix(self, player: int) -> tuple[tuple[Fraction, ...], ...]:
        """Player's payoffs oriented [own strategy][opponent strategy]."""
        if player == 1:
            return self.payoff_1
        return tuple(zip(*self.payoff_2))

    def sort_strategies(self, player: int, strats: Iterable[str]) -> list[str]:
        return sorted(strats, key=lambda s: self.index(player, s))


@dataclass(frozen=True)
class Rectangle:
    side_1: frozenset
    side_2: frozenset

    @classmethod
    def of(cls, side_1: Iterable, side_2: Iterable) -> Rectangle:
        return cls(frozenset(side_1), frozenset(side_2))

    @classmethod
    def full(cls, g: Game) -> Rectangle:
        return cls.of(g.strategies_1, g.strategies_2)

    def side(self, player: int) -> frozenset:
        return self.side_1 if player == 1 else self.side_2

    def replace(self, player: int, side: Iterable) -> Rectangle:
        if player == 1:
            return Rectangle(frozenset(side), self.side_2)
        return Rectangle(self.side_1, frozenset(side))

    def __le__(self, other: Rectangle) -> bool:
        return self.side_1 <= other.side_1 and self.side_2 <= other.side_2

    @property
    def is_empty(self) -> bool:
        """The product set is empty as soon as one side is."""
        return not self.side_1 or not self.side_2


def _as_measure(g: Game, player: int, x: Mixed) -> FiniteMeasure:
    if isinstance(x, FiniteMeasure):
        for p in x.support:
            g.index(player, p)
        return x
    if isinstance(x, str):
        g.index(player, x)
        return FiniteMeasure({x: 1})
    raise MalformedMeasure(f"expected a strategy or a measure, got {type(x).__name__}")


def expected_payoff(g: Game, player: int, own: Mixed, opp: Mixed) -> Fraction:
    """Double expectation of pi_player; pure strategies act as Dirac measures."""
    mu = _as_measure(g, player, own)
    nu = _as_measure(g, other(player), opp)
    total = Fraction(0)
    for s, w in mu.items():
        for t, v in nu.items():
            total += w * v * g.payoff(player, s, t)
    return total


def parse_game(text: str) -> Game:
    name = None
    strategies: dict[int, tuple[str, ...]] = {}
    payoffs: dict[int, list] = {}
    lines = [(no, raw.split("#", 1)[0].strip()) for no, raw in enumerate(text.splitlines(), 1)]
    lines = [(no, line) for no, line in lines if line]
    i = 0
    while i < len(lines):
        no, line = lines[i]
        words = line.split()
        head = words[0]
        if head == "game":
            if len(words) != 2:
                raise GameFormatError("expected 'game <name>'", no)
            if name is not None:
                raise GameFormatError("repeated 'game' line", no)
            name = words[1]
            i += 1
        elif head == "strategies":
            if len(words) < 3 or words[1] not in ("1", "2"):
                raise GameFormatError("expected 'strategies <1|2> <ids...>'", no)
            player = int(words[1])
            if player in strategies:
                raise GameFormatError(f"strategies for player {player} given twice", no)
            ids = tuple(words[2:])
            for s in ids:
                if not IDENT_RE.match(s):
                    raise GameFormatError(f"bad strategy identifier {s!r}", no)
            if len(set(ids)) != len(ids):
                raise GameFormatError(f"duplicate strategy identifier for player {player}", no)
            strategies[player] = ids
            i += 1
        elif head == "payoffs":
            if len(words) != 2 or words[1] not in ("1", "2"):
                raise GameFormatError("expected 'payoffs <1|2>'", no)
            player = int(words[1])
            if player in payoffs:
                raise GameFormatError(f"payoffs for player {player} given twice", no)
            if 1 not in strategies or 2 not in strategies:
                raise GameFormatError("payoffs before both strategy lists", no)
            rows, cols = len(strategies[1]), len(strategies[2])
            mat = []
            i += 1
            while i < len(lines) and lines[i][1].split()[0] not in ("game", "strategies", "payoffs"):
                rno, rline = lines[i]
                try:
                    row = [parse_rational(v) for v in rline.split()]
                except ValueError as exc:
                    raise GameFormatError(str(exc), rno) from None
                if len(row) != cols:
                    raise GameFormatError(
                        f"shape mismatch: row has {len(row)} entries, expected {cols}", rno)
                mat.append(tuple(row))
                i += 1
            if len(mat) != rows:
                raise GameFormatError(
                    f"shape mismatch: payoffs {player} has {len(mat)} rows, expected {rows}", no)
            payoffs[player] = mat
        else:
            raise GameFormatError(f"unexpected {head!r}", no)
    if name is None:
        raise GameFormatError("missing 'game <name>' line")
    for player in (1, 2):
        if player not in strategies:
            raise GameFormatError(f"missing strategies for player {player}")
        if player not in payoffs:
            raise GameFormatError(f"missing payoffs for player {player}")
    return Game(name, strategies[1], strategies[2], tuple(payoffs[1]), tuple(payoffs[2]))


def emit_game(g: Game) -> str:
    out = [f"game {g.name}",
           "strategies 1 " + " ".join(g.strategies_1),
           "strategies 2 " + " ".join(g.strategies_2)]
    for player, mat in ((1, g.payoff_1), (2, g.payoff_2)):
        out.append(f"payoffs {player}")
        out.extend(" ".join(format_rational(v) for v in row) for row in mat)
    return "\n".join(out) + "\n"


def load_game(path) -> Game:
    with open(path, encoding="utf-8") as fh:
        return parse_game(fh.read())
