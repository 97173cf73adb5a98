"""Text format for belief hierarchies.

Grammar (whitespace separates tokens; parentheses are tokens of their own)::

    witness := "(" "hierarchy" "player=" P "strategy=" S level* ")"
    level   := "(" "level" K entry+ ")"
    entry   := "(" point WEIGHT ")"
    point   := "(" STRAT ")"                      order 0
             | "(" "(" STRAT ")" level+ ")"        order >= 1
    WEIGHT  := p/q

Levels are numbered from 1 and appear in order.  Entries follow the
measure's canonical order, so emitting is deterministic.
"""
from __future__ import annotations

import re

from .exact.rational import format_rational, parse_rational
from .hierarchy import Hierarchy, MalformedHierarchy, OrderPoint
from .measure import FiniteMeasure, MalformedMeasure

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


class WitnessSyntaxError(ValueError):
    pass


def _emit_level(k: int, m: FiniteMeasure, out: list):
    out.append(f"(level {k}")
    for p, w in m.items():
        out.append(" (")
        _emit_point(p, out)
        out.append(f" {format_rational(w, always_fraction=True)})")
    out.append(")")


def _emit_point(p: OrderPoint, out: list):
    if not p.beliefs:
        out.append(f"({p.strategy})")
        return
    out.append(f"(({p.strategy})")
    for k, m in enumerate(p.beliefs, 1):
        out.append(" ")
        _emit_level(k, m, out)
    out.append(")")


def emit_hierarchy(h: Hierarchy, strategy) -> str:
    out = [f"(hierarchy player={h.player} strategy={strategy}"]
    for k, m in enumerate(h.levels, 1):
        out.append(" ")
        _emit_level(k, m, out)
    out.append(")")
    return "".join(out)


class _Parser:
    def __init__(self, text: str):
        self.tokens = _TOKEN.findall(text)
        self.pos = 0
        self.points: dict = {}

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected=None) -> str:
        tok = self.peek()
        if tok is None:
            raise WitnessSyntaxError("unexpected end of input")
        if expected is not None and tok != expected:
            raise WitnessSyntaxError(f"token {self.pos}: expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def atom(self) -> str:
        tok = self.take()
        if tok in "()":
            raise WitnessSyntaxError(f"token {self.pos - 1}: expected an identifier, got {tok!r}")
        return tok

    def weight(self):
        tok = self.atom()
        try:
            return parse_rational(tok)
        except ValueError:
            raise WitnessSyntaxError(f"token {self.pos - 1}: weight {tok!r} is not a rational") from None

    def field(self, name: str) -> str:
        tok = self.atom()
        if not tok.startswith(name + "="):
            raise WitnessSyntaxError(f"expected {name}=..., got {tok!r}")
        return tok[len(name) + 1:]

    def levels(self) -> list:
        out = []
        while self.peek() == "(":
            self.take("(")
            self.take("level")
            k = self.atom()
            if k != str(len(out) + 1):
                raise WitnessSyntaxError(f"level {k} out of sequence (expected {len(out) + 1})")
            entries = []
            while self.peek() == "(":
                self.take("(")
                p = self.point()
                entries.append((p, self.weight()))
                self.take(")")
            if not entries:
                raise WitnessSyntaxError(f"level {k} is empty")
            self.take(")")
            try:
                if len({p for p, _ in entries}) != len(entries):
                    raise MalformedMeasure("duplicate support point")
                out.append(FiniteMeasure(dict(entries)))
            except MalformedMeasure as exc:
                raise MalformedHierarchy(str(exc), (f"level {k}",)) from None
        return out

    def point(self) -> OrderPoint:
        self.take("(")
        if self.peek() == "(":
            self.take("(")
            s = self.atom()
            self.take(")")
            beliefs = self.levels()
            if not beliefs:
                raise WitnessSyntaxError(f"point ({s}) has nested form but no levels")
        else:
            s, beliefs = self.atom(), []
        self.take(")")
        p = OrderPoint(s, beliefs)
        return self.points.setdefault(p, p)  # share equal subterms


def parse_hierarchy(text: str) -> tuple[Hierarchy, str]:
    """Returns the hierarchy and the strategy it is attached to."""
    ps = _Parser(text)
    ps.take("(")
    ps.take("hierarchy")
    player = ps.field("player")
    if player not in ("1", "2"):
        raise WitnessSyntaxError(f"player must be 1 or 2, got {player!r}")
    strategy = ps.field("strategy")
    levels = ps.levels()
    ps.take(")")
    if ps.peek() is not None:
        raise WitnessSyntaxError(f"trailing input at token {ps.pos}")
    return Hierarchy(int(player), tuple(levels)), strategy
