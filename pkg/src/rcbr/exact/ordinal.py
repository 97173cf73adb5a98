"""Ordinals below omega^5 in Cantor normal form."""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

MAX_EXPONENT = 4


class OrdinalOverflow(ValueError):
    pass


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """``cnf`` holds coefficients from the highest power of omega down to the
    constant term, e.g. ``(1, 3)`` is omega + 3 and ``()`` is zero."""

    cnf: tuple[int, ...] = ()

    def __post_init__(self):
        cnf = tuple(int(c) for c in self.cnf)
        if any(c < 0 for c in cnf):
            raise ValueError(f"negative coefficient in {cnf}")
        i = 0
        while i < len(cnf) and cnf[i] == 0:
            i += 1
        cnf = cnf[i:]
        if len(cnf) > MAX_EXPONENT + 1:
            raise OrdinalOverflow(f"ordinal exceeds omega^{MAX_EXPONENT + 1}")
        object.__setattr__(self, "cnf", cnf)

    @classmethod
    def of(cls, n: int) -> Ordinal:
        return cls((n,))

    @classmethod
    def omega(cls, times: int = 1, plus: int = 0) -> Ordinal:
        return cls((times, plus))

    def _padded(self, length: int) -> tuple[int, ...]:
        return (0,) * (length - len(self.cnf)) + self.cnf

    def _key(self, other: Ordinal) -> tuple[tuple[int, ...], tuple[int, ...]]:
        n = max(len(self.cnf), len(other.cnf))
        return self._padded(n), other._padded(n)

    def __lt__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        a, b = self._key(other)
        return a < b

    def __eq__(self, other):
        if isinstance(other, int):
            other = Ordinal.of(other)
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self.cnf == other.cnf

    def __hash__(self):
        return hash(self.cnf)

    def succ(self) -> Ordinal:
        if not self.cnf:
            return Ordinal((1,))
        return Ordinal(self.cnf[:-1] + (self.cnf[-1] + 1,))

    @property
    def is_zero(self) -> bool:
        return not self.cnf

    @property
    def is_limit(self) -> bool:
        return bool(self.cnf) and self.cnf[-1] == 0

    @property
    def is_finite(self) -> bool:
        return len(self.cnf) <= 1

    @property
    def finite_part(self) -> int:
        return self.cnf[-1] if self.cnf else 0

    def limit_part(self) -> Ordinal:
        """The largest limit ordinal (or zero) not exceeding self."""
        if not self.cnf:
            return self
        return Ordinal(self.cnf[:-1] + (0,))

    def plus(self, n: int) -> Ordinal:
        """self + n for a natural number n."""
        if n < 0:
            raise ValueError("can only add naturals")
        if n == 0:
            return self
        if not self.cnf:
            return Ordinal.of(n)
        return Ordinal(self.cnf[:-1] + (self.cnf[-1] + n,))

    def __int__(self):
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return self.finite_part

    def __str__(self):
        if not self.cnf:
            return "0"
        terms = []
        top = len(self.cnf) - 1
        for i, c in enumerate(self.cnf):
            e = top - i
            if c == 0:
                continue
            if e == 0:
                terms.append(str(c))
            elif e == 1:
                terms.append(f"w*{c}")
            else:
                terms.append(f"w^{e}*{c}")
        return "+".join(terms)

    def __repr__(self):
        return f"Ordinal({self})"


def ordinal_succ(o: Ordinal) -> Ordinal:
    return o.succ()


def ordinal_cmp(a: Ordinal, b: Ordinal) -> str:
    if a < b:
        return "<"
    if a == b:
        return "="
    return ">"


_TERM_RE = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_ordinal(text: str) -> Ordinal:
    text = text.strip().replace(" ", "")
    if not text:
        raise ValueError("empty ordinal")
    coeffs: dict[int, int] = {}
    for term in text.split("+"):
        m = _TERM_RE.match(term)
        if m is None:
            raise ValueError(f"bad ordinal term {term!r} in {text!r}")
        if m.group(3) is not None:
            exp, c = 0, int(m.group(3))
        else:
            exp = int(m.group(1)) if m.group(1) is not None else 1
            c = int(m.group(2)) if m.group(2) is not None else 1
        if exp in coeffs:
            raise ValueError(f"repeated power w^{exp} in {text!r}")
        if coeffs and exp >= min(coeffs):
            raise ValueError(f"terms must be in decreasing powers: {text!r}")
        coeffs[exp] = c
    top = max(coeffs)
    if top > MAX_EXPONENT:
        raise OrdinalOverflow(f"ordinal exceeds omega^{MAX_EXPONENT + 1}: {text!r}")
    return Ordinal(tuple(coeffs.get(e, 0) for e in range(top, -1, -1)))
