"""Finite-support probability measures with exact weights.

Measures are immutable and kept in a normal form: support sorted by
:func:`point_key`, strictly positive weights summing to one.  Equality and
hashing go through the normal form, so construction order never matters.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping

ZERO = Fraction(0)
ONE = Fraction(1)

_CHUNKS = re.compile(r"(\d+)")


class MalformedMeasure(ValueError):
    pass


def point_key(p: Any):
    """Total order on points: natural order on identifiers, recursive
    lexicographic order on structured points."""
    key = getattr(p, "sort_key", None)
    if key is not None:
        return key
    if isinstance(p, str):
        parts = tuple((0, int(c), "") if c.isdigit() else (1, 0, c)
                      for c in _CHUNKS.split(p) if c)
        return (1, parts, p)
    if isinstance(p, bool):
        return (0, int(p))
    if isinstance(p, (int, Fraction)):
        return (0, p)
    if isinstance(p, tuple):
        return (2, tuple(point_key(q) for q in p))
    raise TypeError(f"no canonical order for {type(p).__name__}")


class FiniteMeasure:
    """Probability measure with finite support."""

    __slots__ = ("support", "weights", "_hash", "_key")

    def __init__(self, weights: Mapping[Hashable, Any]):
        items = []
        total = ZERO
        for p, w in weights.items():
            w = Fraction(w)
            if w <= 0:
                raise MalformedMeasure(f"nonpositive weight {w} at {p!r}")
            items.append((point_key(p), p, w))
            total += w
        if not items:
            raise MalformedMeasure("empty support")
        if total != 1:
            raise MalformedMeasure(f"weights sum to {total}, not 1")
        items.sort(key=lambda t: t[0])
        self.support = tuple(p for _, p, _ in items)
        self.weights = tuple(w for _, _, w in items)
        self._hash = hash(frozenset(zip(self.support, self.weights)))
        self._key = None

    @classmethod
    def from_raw(cls, support: Iterable, weights: Iterable) -> FiniteMeasure:
        """Build from parallel lists, insisting they already are a normal form."""
        support = list(support)
        weights = [Fraction(w) for w in weights]
        if len(support) != len(weights):
            raise MalformedMeasure("support and weights differ in length")
        if len(set(support)) != len(support):
            raise MalformedMeasure("duplicate support point")
        keys = [point_key(p) for p in support]
        if keys != sorted(keys):
            raise MalformedMeasure("support not in canonical order")
        return cls(dict(zip(support, weights)))

    @classmethod
    def normalized(cls, pairs: Iterable[tuple[Hashable, Any]]) -> FiniteMeasure:
        """Merge repeated points by adding weights; zero weights are dropped."""
        acc: dict = {}
        for p, w in pairs:
            acc[p] = acc.get(p, ZERO) + Fraction(w)
        return cls({p: w for p, w in acc.items() if w != 0})

    def items(self):
        return zip(self.support, self.weights)

    def as_dict(self) -> dict:
        return dict(zip(self.support, self.weights))

    def __getitem__(self, p) -> Fraction:
        for q, w in zip(self.support, self.weights):
            if q == p:
                return w
        return ZERO

    def __len__(self):
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteMeasure):
            return NotImplemented
        if self._hash != other._hash or len(self.support) != len(other.support):
            return False
        return self.as_dict() == other.as_dict()

    @property
    def sort_key(self):
        if self._key is None:
            self._key = (3, tuple((point_key(p), w) for p, w in self.items()))
        return self._key

    def __repr__(self):
        body = ", ".join(f"{p!r}: {w}" for p, w in self.items())
        return f"FiniteMeasure({{{body}}})"

    def mixture(self, alpha, other: FiniteMeasure) -> FiniteMeasure:
        """alpha * self + (1 - alpha) * other."""
        alpha = Fraction(alpha)
        pairs = [(p, alpha * w) for p, w in self.items()]
        pairs += [(p, (1 - alpha) * w) for p, w in other.items()]
        return FiniteMeasure.normalized(pairs)


Belief = FiniteMeasure


def dirac(p: Hashable) -> FiniteMeasure:
    return FiniteMeasure({p: ONE})


def pushforward(m: FiniteMeasure, f: Callable[[Any], Hashable]) -> FiniteMeasure:
    return FiniteMeasure.normalized((f(p), w) for p, w in m.items())


def marginal(m: FiniteMeasure, component: int) -> FiniteMeasure:
    """Marginal of a measure over tuples onto one coordinate."""
    return pushforward(m, lambda p: p[component])


def is_concentrated(m: FiniteMeasure, points) -> bool:
    """m(points) = 1, i.e. the support is contained in ``points``."""
    points = points if isinstance(points, (set, frozenset, dict)) else set(points)
    return all(p in points for p in m.support)
