"""Iterated elimination on finite games and on polyhedral relations."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Union

from .exact.lp import LinearSystem, lp_feasible
from .exact.ordinal import Ordinal
from .game import Game, Rectangle, other
from .measure import FiniteMeasure
from .response import (
    belief_polyhedron, dominates, find_justifying_belief, is_best_response,
    is_strictly_dominated, support_rows,
)

CONCEPTS = ("RAT", "MRAT", "IU", "MIU")


class CertificateError(AssertionError):
    """An elimination or survival failed its independent re-check."""


@dataclass(frozen=True, eq=False)
class PolyhedralRelation:
    """For each player and strategy s, a system over the opponent belief
    simplex (variables in opponent list order) whose solutions are E_i(s)."""

    strategies_1: tuple
    strategies_2: tuple
    systems_1: Mapping[str, LinearSystem]
    systems_2: Mapping[str, LinearSystem]
    name: str = "relation"

    def strategies(self, player: int) -> tuple:
        return self.strategies_1 if player == 1 else self.strategies_2

    def system(self, player: int, s) -> LinearSystem:
        return (self.systems_1 if player == 1 else self.systems_2)[s]

    def index(self, player: int, s) -> int:
        return self.strategies(player).index(s)

    def sort_strategies(self, player: int, strats: Iterable) -> list:
        return sorted(strats, key=lambda s: self.index(player, s))

    def contains(self, player: int, s, mu: FiniteMeasure) -> bool:
        """(s, mu) in E_player, by exact substitution."""
        opp = self.strategies(other(player))
        known = set(opp)
        if any(t not in known for t in mu.support):
            return False
        return self.system(player, s).satisfied_by([mu[t] for t in opp])

    def justify(self, player: int, s, restriction: Iterable) -> Optional[FiniteMeasure]:
        """Canonical mu with (s, mu) in E and support inside ``restriction``."""
        opp = self.strategies(other(player))
        restr = set(restriction)
        allowed = tuple(k for k, t in enumerate(opp) if t in restr)
        if not allowed:
            return None
        x = _relation_feasible(self.system(player, s), allowed)
        if x is None:
            return None
        return FiniteMeasure({t: w for t, w in zip(opp, x) if w})


@lru_cache(maxsize=1 << 16)
def _relation_feasible(system: LinearSystem, allowed: tuple[int, ...]):
    return lp_feasible(system.with_rows(support_rows(system.n, allowed)))


def best_response_relation(g: Game) -> PolyhedralRelation:
    systems = []
    for player in (1, 2):
        systems.append({s: belief_polyhedron(g, player, s).system for s in g.strategies(player)})
    return PolyhedralRelation(g.strategies_1, g.strategies_2, systems[0], systems[1], g.name)


Source = Union[Game, PolyhedralRelation]


def as_relation(source: Source) -> PolyhedralRelation:
    if isinstance(source, Game):
        return _cached_relation(source)
    return source


@lru_cache(maxsize=4096)
def _cached_relation(g: Game) -> PolyhedralRelation:
    return best_response_relation(g)


@dataclass(frozen=True)
class Stage:
    """Survivors X^label after this stage and what it removed from X^(label-1).

    ``justifications`` maps (player, s) for every survivor to the belief that
    kept it (None for dominance concepts, where survival is an absence);
    ``certificates`` maps each eliminated (player, s) to a strictly dominating
    mixture, or None when no certificate exists (empty opposing side, or an
    abstract relation)."""

    label: Ordinal
    rectangle: Rectangle
    eliminated: tuple[tuple, tuple] = ((), ())
    justifications: Mapping = field(default_factory=dict)
    certificates: Mapping = field(default_factory=dict)
    limit: bool = False


@dataclass(frozen=True)
class EliminationTrace:
    concept: str
    stages: tuple[Stage, ...]
    convergence_ordinal: Ordinal
    final_justifications: Mapping = field(default_factory=dict)

    @property
    def final(self) -> Rectangle:
        return self.stages[-1].rectangle

    def survivors(self, player: int) -> frozenset:
        return self.final.side(player)

    def stage_rectangle(self, label) -> Rectangle:
        """X^label, constant once the fixpoint is reached."""
        label = Ordinal.of(label) if isinstance(label, int) else label
        best = self.stages[0]
        for st in self.stages:
            if st.label <= label:
                best = st
        return best.rectangle

    def elimination_ordinal(self, player: int, s) -> Optional[Ordinal]:
        """gamma with s in X^gamma minus X^(gamma+1); None for survivors."""
        for st in self.stages[1:]:
            if s in st.eliminated[player - 1]:
                return Ordinal(st.label.cnf[:-1] + (st.label.cnf[-1] - 1,))
        return None


def _stage(source: Source, concept: str, rect: Rectangle, strategies, verify: bool):
    sides = [set(rect.side_1), set(rect.side_2)]
    eliminated: list[list] = [[], []]
    justifications: dict = {}
    certificates: dict = {}
    is_game = isinstance(source, Game)
    for player in (1, 2):
        j = other(player)
        own_all = strategies(player)
        own_now = [s for s in own_all if s in rect.side(player)]
        opp = rect.side(j)
        for s in own_now:
            if not opp:
                eliminated[player - 1].append(s)
                certificates[(player, s)] = None
                continue
            if concept in ("RAT", "MRAT"):
                alts = own_all if concept == "RAT" else own_now
                mu = find_justifying_belief(source, player, s, opp, alts)
                if mu is not None:
                    if verify and not (is_best_response(source, player, s, mu, alts)
                                       and set(mu.support) <= opp):
                        raise CertificateError(f"belief for {s} does not re-verify")
                    justifications[(player, s)] = mu
                    continue
                sigma = is_strictly_dominated(source, player, s, alts, opp)
                if sigma is None:
                    raise CertificateError(
                        f"{s} has no justifying belief but no dominating mixture either")
            elif concept in ("IU", "MIU"):
                mix = own_all if concept == "IU" else own_now
                sigma = is_strictly_dominated(source, player, s, mix, opp)
                if sigma is None:
                    justifications[(player, s)] = None
                    continue
            elif concept == "E-RAT":
                rel = source if not is_game else as_relation(source)
                mu = rel.justify(player, s, opp)
                if mu is not None:
                    if verify and not (rel.contains(player, s, mu) and set(mu.support) <= opp):
                        raise CertificateError(f"belief for {s} does not re-verify")
                    justifications[(player, s)] = mu
                    continue
                sigma = None
            else:
                raise ValueError(f"unknown concept {concept!r}")
            if verify and sigma is not None and not dominates(source, player, sigma, s, opp):
                raise CertificateError(f"mixture does not dominate {s}")
            eliminated[player - 1].append(s)
            certificates[(player, s)] = sigma
    for player in (1, 2):
        sides[player - 1] -= set(eliminated[player - 1])
    new_rect = Rectangle.of(*sides)
    return new_rect, (tuple(eliminated[0]), tuple(eliminated[1])), justifications, certificates


def _run(source: Source, concept: str, strategies, verify: bool) -> EliminationTrace:
    rect = Rectangle.of(strategies(1), strategies(2))
    stages = [Stage(Ordinal.of(0), rect)]
    k = 0
    while True:
        new_rect, elim, just, cert = _stage(source, concept, rect, strategies, verify)
        if not elim[0] and not elim[1]:
            final_just = just
            if concept in ("IU", "MIU") and isinstance(source, Game):
                # Pearce dual of non-domination: a belief for each survivor
                final_just = {}
                for player in (1, 2):
                    mix = (source.strategies(player) if concept == "IU"
                           else rect.side(player))
                    for s in rect.side(player):
                        mu = find_justifying_belief(source, player, s,
                                                    rect.side(other(player)), mix)
                        if mu is None:
                            raise CertificateError(f"undominated {s} has no belief")
                        final_just[(player, s)] = mu
            return EliminationTrace(concept, tuple(stages), Ordinal.of(k), final_just)
        k += 1
        rect = new_rect
        stages.append(Stage(Ordinal.of(k), rect, elim, just, cert))


def eliminate(g: Game, concept: str = "RAT", verify: bool = True) -> EliminationTrace:
    """Run RAT, MRAT, IU or MIU to its fixpoint."""
    concept = concept.upper()
    if concept not in CONCEPTS:
        raise ValueError(f"unknown concept {concept!r}; expected one of {CONCEPTS}")
    return _run(g, concept, g.strategies, verify)


def rat_of_relation(E: Source, verify: bool = True) -> EliminationTrace:
    """Iterated deletion of non-E-justified strategies."""
    rel = as_relation(E)
    return _run(rel, "E-RAT", rel.strategies, verify)


def check_e_justified(E: Source, r: Rectangle) -> tuple[bool, dict]:
    """Whether every strategy of ``r`` has an E-belief concentrated on the
    other side; returns the per-strategy certificates (None for failures)."""
    rel = as_relation(E)
    certs: dict = {}
    ok = True
    for player in (1, 2):
        opp = r.side(other(player))
        for s in rel.sort_strategies(player, r.side(player)):
            mu = rel.justify(player, s, opp) if opp else None
            certs[(player, s)] = mu
            ok = ok and mu is not None
    return ok, certs


def is_maximal(E: Source, r: Rectangle) -> bool:
    """No strategy outside ``r`` can be justified by a belief on the other side."""
    rel = as_relation(E)
    for player in (1, 2):
        opp = r.side(other(player))
        for s in rel.strategies(player):
            if s not in r.side(player) and opp and rel.justify(player, s, opp) is not None:
                return False
    return True


def verify_trace(source: Source, trace: EliminationTrace) -> list[str]:
    """Independent audit of a trace; returns a list of discrepancies."""
    problems = []
    rel = as_relation(source)
    for prev, st in zip(trace.stages, trace.stages[1:]):
        if not st.rectangle <= prev.rectangle:
            problems.append(f"stage {st.label}: rectangle grew")
    ok, certs = check_e_justified(rel, trace.final)
    if trace.concept in ("RAT", "E-RAT") and not ok:
        problems.append("final rectangle is not E-justified")
    for (player, s), mu in trace.final_justifications.items():
        if mu is None:
            continue
        if not set(mu.support) <= trace.final.side(other(player)):
            problems.append(f"justification of {s} leaves the final rectangle")
    if isinstance(source, Game):
        again = _stage(source, trace.concept, trace.final, source.strategies, True)
        if again[1] != ((), ()):
            problems.append("final rectangle is not a fixpoint")
        for st in trace.stages[1:]:
            for (player, s), sigma in st.certificates.items():
                prev = trace.stage_rectangle(Ordinal(st.label.cnf[:-1] + (st.label.cnf[-1] - 1,)))
                opp = prev.side(other(player))
                if sigma is not None and not dominates(source, player, sigma, s, opp):
                    problems.append(f"stage {st.label}: certificate for {s} fails")
    return problems


def _fmt_side(source: Source, player: int, side) -> str:
    return "{" + ", ".join(str(s) for s in source.sort_strategies(player, side)) + "}"


def format_trace(source: Source, trace: EliminationTrace) -> str:
    out = [f"concept {trace.concept}"]
    for st in trace.stages[1:]:
        e1 = " ".join(str(s) for s in st.eliminated[0]) or "-"
        e2 = " ".join(str(s) for s in st.eliminated[1]) or "-"
        out.append(f"stage {st.label}: eliminated 1: {e1} ; eliminated 2: {e2}")
    fin = trace.final
    out.append(f"fixpoint: {_fmt_side(source, 1, fin.side_1)} x "
               f"{_fmt_side(source, 2, fin.side_2)} at {trace.convergence_ordinal}")
    return "\n".join(out) + "\n"


def format_justifications(source: Source, trace: EliminationTrace) -> str:
    from .exact.rational import format_rational
    lines = []
    for player in (1, 2):
        for s in source.sort_strategies(player, trace.final.side(player)):
            mu = trace.final_justifications.get((player, s))
            if mu is None:
                continue
            body = " ".join(f"{t}={format_rational(w)}" for t, w in mu.items())
            lines.append(f"justify {player} {s}: {body}")
    return "\n".join(lines) + ("\n" if lines else "")

