"""The ranked integer games: strategies are naturals, ranked by

    psi(m*n + r) = omega*a_r + n,

and pi_1(x, y) = 1 iff psi(y) < psi(x), pi_2(x, y) = pi_1(y, x).

Survivor sets are unions of tails of residue classes mod m, stored as one
lower bound per class (None for an emptied class).  Successor stages use
:func:`ranked_justifiable`; limit stages take the intersection, which is
computed once the stage map is seen to translate a group of classes by one
step forever (see :func:`_drift`).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

from .exact.ordinal import Ordinal, parse_ordinal
from .game import Game, GameFormatError


@dataclass(frozen=True)
class RankedGame:
    modulus: int
    coeffs: tuple[int, ...]
    horizon: int
    name: str = "ranked"

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if len(self.coeffs) != self.modulus:
            raise ValueError(f"need {self.modulus} coefficients, got {len(self.coeffs)}")
        if any(a < 0 for a in self.coeffs):
            raise ValueError("coefficients must be naturals")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    def psi(self, k: int) -> Ordinal:
        n, r = divmod(k, self.modulus)
        return Ordinal.omega(self.coeffs[r], n)

    @property
    def bound(self) -> Ordinal:
        """omega * (1 + max a_r), the length of the rank order."""
        return Ordinal.omega(1 + max(self.coeffs), 0)

    def payoff(self, x: int, y: int) -> int:
        return 1 if self.psi(y) < self.psi(x) else 0


@dataclass(frozen=True)
class TailSet:
    """{m*n + r : n >= bounds[r]}, with None meaning the class is empty."""

    bounds: tuple[Optional[int], ...]

    @classmethod
    def full(cls, m: int) -> TailSet:
        return cls((0,) * m)

    def __contains__(self, k: int) -> bool:
        n, r = divmod(k, len(self.bounds))
        b = self.bounds[r]
        return b is not None and n >= b

    @property
    def is_empty(self) -> bool:
        return all(b is None for b in self.bounds)

    def enumerate(self, horizon: int) -> list[int]:
        return [k for k in range(horizon) if k in self]

    def class_minima(self) -> list[int]:
        m = len(self.bounds)
        return [m * b + r for r, b in enumerate(self.bounds) if b is not None]


Survivors = Union[TailSet, Iterable[int]]


def ranked_stages(rg: RankedGame, gamma: Ordinal) -> list[int]:
    """Closed form psi^-1(alpha minus gamma), enumerated below the horizon."""
    if gamma > rg.bound:
        raise ValueError(f"{gamma} exceeds the family bound {rg.bound}")
    return [k for k in range(rg.horizon) if rg.psi(k) >= gamma]


def ranked_justifiable(rg: RankedGame, x: int, S: Survivors,
                       universe: Optional[Iterable[int]] = None) -> bool:
    """Whether x is a best response to some belief concentrated on S.

    Against mu, x earns mu(rank < psi(x)) while the supremum over alternatives
    is 1 unless the rank order has a largest element.  So x is justified iff
    some survivor ranks strictly below x, or S meets the top rank class.  On
    the infinite family there is no top class; pass ``universe`` to work on a
    finite truncation instead.
    """
    if isinstance(S, TailSet):
        if universe is not None:
            raise ValueError("a tail set lives on the infinite family")
        candidates = S.class_minima()  # psi increases along each class
    else:
        candidates = list(S)
    if not candidates:
        raise ValueError("survivor set must be nonempty")
    rank = rg.psi(x)
    if any(rg.psi(s) < rank for s in candidates):
        return True
    if universe is not None:
        top = max(rg.psi(k) for k in universe)
        return any(rg.psi(s) == top for s in candidates)
    return False


_SCAN_LIMIT = 1 << 20


def ranked_step(rg: RankedGame, S: TailSet) -> TailSet:
    """One successor stage: keep the justified strategies of S."""
    if S.is_empty:
        return S
    m = rg.modulus
    new = []
    for r, b in enumerate(S.bounds):
        if b is None:
            new.append(None)
            continue
        n = b
        # justification is monotone along a class, so the survivors form a tail
        while not ranked_justifiable(rg, m * n + r, S):
            n += 1
            if n - b > _SCAN_LIMIT:
                raise RuntimeError("no justified element found in class")
        new.append(n)
    return TailSet(tuple(new))


def _drift(rg: RankedGame, S: TailSet) -> Optional[frozenset]:
    """Classes that the stage map shifts by one at every later stage, or None.

    Let a* be the least coefficient among live classes and D those classes
    with coefficient a*.  When every class in D sits at the same bound l, the
    least surviving rank is omega*a* + l, so a stage moves each class of D to
    l + 1 and leaves the other live classes (ranks >= omega*(a*+1)) alone; the
    resulting state has the same shape, hence the shift repeats at every
    finite stage and the intersection empties exactly the classes of D.
    """
    live = [r for r, b in enumerate(S.bounds) if b is not None]
    if not live:
        return None
    low = min(rg.coeffs[r] for r in live)
    group = [r for r in live if rg.coeffs[r] == low]
    if len({S.bounds[r] for r in group}) != 1:
        return None
    return frozenset(group)


@dataclass(frozen=True)
class RankedStage:
    label: Ordinal
    survivors: TailSet
    limit: bool = False


@dataclass(frozen=True)
class RankedTrace:
    game: RankedGame
    stages: tuple[RankedStage, ...]  # stage 0, recorded finite stages, every limit stage
    convergence_ordinal: Ordinal

    def _anchor(self, gamma: Ordinal) -> RankedStage:
        anchors = [st for st in self.stages if st.label <= gamma
                   and (st.label.is_zero or st.limit)]
        return anchors[-1]

    def survivors_at(self, gamma: Ordinal) -> TailSet:
        """X^gamma, recomputed from the last limit stage at or below gamma."""
        if gamma > self.game.bound:
            raise ValueError(f"{gamma} exceeds the family bound {self.game.bound}")
        if gamma >= self.convergence_ordinal:
            return self.stages[-1].survivors
        anchor = self._anchor(gamma)
        S = anchor.survivors
        for _ in range(gamma.finite_part - anchor.label.finite_part):
            S = ranked_step(self.game, S)
        return S

    def enumerate(self, gamma: Ordinal) -> list[int]:
        return self.survivors_at(gamma).enumerate(self.game.horizon)

    def elimination_ordinal(self, k: int) -> Optional[Ordinal]:
        """gamma with k in X^gamma minus X^(gamma+1)."""
        anchors = [st for st in self.stages if st.label.is_zero or st.limit]
        for st in reversed(anchors):
            if k in st.survivors:
                S, label = st.survivors, st.label
                while True:
                    nxt = ranked_step(self.game, S)
                    if k not in nxt:
                        return label
                    if nxt == S:
                        return None
                    S, label = nxt, label.succ()
        return None


def run_ranked(rg: RankedGame) -> RankedTrace:
    """Transfinite elimination up to the fixpoint.

    Finite stages are recorded until the drifting classes have moved past the
    horizon; stages beyond that are recomputed on demand by the trace.
    """
    state = TailSet.full(rg.modulus)
    label = Ordinal.of(0)
    stages = [RankedStage(label, state)]
    shown = -(-rg.horizon // rg.modulus)
    while True:
        nxt = ranked_step(rg, state)
        if nxt == state:
            return RankedTrace(rg, tuple(stages), label)
        group = _drift(rg, state)
        if group is None:
            state, label = nxt, label.succ()
            stages.append(RankedStage(label, state))
            continue
        expected = tuple(b + 1 if r in group else b for r, b in enumerate(state.bounds))
        if nxt.bounds != expected:
            raise AssertionError("stage map disagrees with the drift analysis")
        for _ in range(shown):
            state, label = ranked_step(rg, state), label.succ()
            stages.append(RankedStage(label, state))
        state = TailSet(tuple(None if r in group else b for r, b in enumerate(state.bounds)))
        label = Ordinal(label.cnf[:-2] + (label.cnf[-2] + 1 if len(label.cnf) >= 2 else 1, 0))
        stages.append(RankedStage(label, state, limit=True))


def truncated_game(rg: RankedGame) -> Game:
    """The finite game on {0, ..., horizon-1} with the same payoffs."""
    ids = tuple(str(k) for k in range(rg.horizon))
    p1 = tuple(tuple(Fraction(rg.payoff(x, y)) for y in range(rg.horizon))
               for x in range(rg.horizon))
    p2 = tuple(tuple(Fraction(rg.payoff(y, x)) for y in range(rg.horizon))
               for x in range(rg.horizon))
    return Game(f"{rg.name}-truncated", ids, ids, p1, p2)


def parse_ranked(text: str) -> RankedGame:
    fields: dict = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        key = words[0]
        if key in fields:
            raise GameFormatError(f"repeated {key!r}", no)
        try:
            if key == "ranked-game" and len(words) == 2:
                fields[key] = words[1]
            elif key in ("modulus", "horizon") and len(words) == 2:
                fields[key] = int(words[1])
            elif key == "coeffs" and len(words) >= 2:
                fields[key] = tuple(int(w) for w in words[1:])
            else:
                raise GameFormatError(f"unexpected line {line!r}", no)
        except ValueError as exc:
            if isinstance(exc, GameFormatError):
                raise
            raise GameFormatError(str(exc), no) from None
    for key in ("ranked-game", "modulus", "coeffs", "horizon"):
        if key not in fields:
            raise GameFormatError(f"missing {key!r} line")
    try:
        return RankedGame(fields["modulus"], fields["coeffs"], fields["horizon"],
                          fields["ranked-game"])
    except ValueError as exc:
        raise GameFormatError(str(exc)) from None


def emit_ranked(rg: RankedGame) -> str:
    return (f"ranked-game {rg.name}\nmodulus {rg.modulus}\n"
            f"coeffs {' '.join(map(str, rg.coeffs))}\nhorizon {rg.horizon}\n")


def format_ranked_trace(trace: RankedTrace) -> str:
    rg = trace.game
    out = [f"ranked-game {rg.name} (bound {rg.bound})"]
    prev = None
    for st in trace.stages:
        cur = set(st.survivors.enumerate(rg.horizon))
        if prev is not None:
            gone = sorted(prev - cur)
            tag = " limit (intersection)" if st.limit else ""
            ids = " ".join(map(str, gone)) or "-"
            out.append(f"stage {st.label}:{tag} eliminated 1: {ids} ; eliminated 2: {ids}")
        prev = cur
    final = trace.stages[-1].survivors.enumerate(rg.horizon)
    side = "{" + ", ".join(map(str, final)) + "}"
    out.append(f"fixpoint: {side} x {side} at {trace.convergence_ordinal}")
    return "\n".join(out) + "\n"


__all__ = [
    "RankedGame", "RankedStage", "RankedTrace", "TailSet", "emit_ranked", "format_ranked_trace",
    "parse_ordinal", "parse_ranked", "ranked_justifiable", "ranked_stages", "ranked_step",
    "run_ranked", "truncated_game",
]
