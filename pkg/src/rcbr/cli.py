"""Command-line front end.

Exit codes: 0 success, 1 a check or validation failed, 2 bad input
(unreadable or malformed file, unknown strategy, bad flag).
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional, TextIO

from .elimination import CONCEPTS, eliminate, format_justifications, format_trace, verify_trace
from .exact.ordinal import Ordinal, parse_ordinal
from .exact.rational import format_rational, parse_rational
from .game import Game, GameFormatError, UnknownStrategy, emit_game, parse_game
from .hierarchy import (
    MalformedHierarchy, build_witness, check_hereditarily_coherent, check_rcbr_star, lubin_lift,
    rcbr_star_levels,
)
from .justification import (
    DescentII, FallbackI, JMoveI, arena_for, format_transcript,
    legal_moves_I, parse_move_I, play, replay, synthesize_I,
)
from .measure import FiniteMeasure, MalformedMeasure, point_key
from .ranked import (
    RankedGame, format_ranked_trace, parse_ranked, ranked_stages, run_ranked, truncated_game,
)
from .response import (
    is_strictly_dominated, never_best_response, pearce_auxiliary_game, solve_zero_sum,
)
from .sweep import (
    check_fundamental, check_justification, check_pearce, corpus_size, exhaustive_corpus,
    parse_values, sampled_corpus,
)
from .witness import WitnessSyntaxError, emit_hierarchy, parse_hierarchy

INPUT_ERRORS = (OSError, GameFormatError, WitnessSyntaxError, MalformedHierarchy,
                MalformedMeasure, UnknownStrategy, ValueError)


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def load_source(path: str):
    """A Game or a RankedGame, by the file's first keyword."""
    text = _read(path)
    first = next((ln.split("#", 1)[0].split() for ln in text.splitlines()
                  if ln.split("#", 1)[0].strip()), [""])[0]
    try:
        return parse_ranked(text) if first == "ranked-game" else parse_game(text)
    except GameFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _load_game(path: str) -> Game:
    src = load_source(path)
    if not isinstance(src, Game):
        raise InputError(f"{path}: expected a game file")
    return src


def _fmt_measure(mu: FiniteMeasure) -> str:
    return " ".join(f"{p}={format_rational(w)}" for p, w in mu.items())


def _strategy(g: Game, player: int, s: str) -> str:
    if s not in g.strategies(player):
        raise InputError(f"unknown strategy {s!r} for player {player} "
                         f"(known: {' '.join(g.strategies(player))})")
    return s


# ---- subcommands -----------------------------------------------------------------

def cmd_solve(args, out: TextIO) -> int:
    g = _load_game(args.game)
    trace = eliminate(g, args.concept)
    out.write(format_trace(g, trace))
    if args.justifications:
        out.write(format_justifications(g, trace))
    problems = verify_trace(g, trace)
    for p in problems:
        out.write(f"audit: {p}\n")
    return 1 if problems else 0


def cmd_dominance(args, out: TextIO) -> int:
    g = _load_game(args.game)
    s = _strategy(g, args.player, args.strategy)
    nbr = never_best_response(g, args.player, s)
    sigma = is_strictly_dominated(g, args.player, s)
    aux = pearce_auxiliary_game(g, args.player, s)
    row, col, value = solve_zero_sum(aux)
    out.write(f"strategy {args.player}:{s}\n")
    out.write(f"never-best-response: {'yes' if nbr else 'no'}\n")
    out.write(f"dominated-by: {_fmt_measure(sigma) if sigma is not None else '-'}\n")
    cols = aux.strategies_2
    out.write(f"auxiliary game (columns {' '.join(cols)}):\n")
    for r, vals in zip(aux.strategies_1, aux.payoff_1):
        out.write(f"  {r}: {' '.join(format_rational(v) for v in vals)}\n")
    out.write(f"value: {format_rational(value)}\n")
    out.write(f"row-mix: {_fmt_measure(row)}\ncolumn-mix: {_fmt_measure(col)}\n")
    consistent = nbr == (sigma is not None) == (value > 0)
    out.write(f"cross-check: {'consistent' if consistent else 'INCONSISTENT'}\n")
    return 0 if consistent else 1


def cmd_certify(args, out: TextIO) -> int:
    g = _load_game(args.game)
    trace = eliminate(g, "RAT")
    wm = build_witness(g, trace, args.depth)
    out.write(format_trace(g, trace))
    if wm.note:
        out.write(f"note: {wm.note}\n")
        return 0
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    failed = 0
    for (player, s), h in wm.hierarchies.items():
        text = emit_hierarchy(h, s)
        if outdir:
            path = outdir / f"{g.name}-{player}-{s}.witness"
            path.write_text(text + "\n", encoding="utf-8")
            where = str(path)
        else:
            out.write(text + "\n")
            where = "stdout"
        back, strat = parse_hierarchy(text)
        ok = back == h and strat == s and all(rcbr_star_levels(g, player, s, back))
        failed += not ok
        out.write(f"witness {player}:{s} -> {where}: levels 1..{args.depth} "
                  f"{'ok' if ok else 'FAILED'}\n")
    return 1 if failed else 0


def cmd_check(args, out: TextIO) -> int:
    h, s = parse_hierarchy(_read(args.witness))
    g = _load_game(args.game)
    n = args.level if args.level is not None else h.depth
    if not 1 <= n <= h.depth:
        raise InputError(f"--level {n} outside 1..{h.depth}")
    coherent = check_hereditarily_coherent(h)
    ok = coherent and check_rcbr_star(g, h.player, s, h, n)
    out.write(f"hierarchy player={h.player} strategy={s} depth={h.depth}\n")
    out.write(f"hereditarily coherent: {'yes' if coherent else 'no'}\n")
    out.write(f"rcbr* level {n}: {'pass' if ok else 'fail'}\n")
    return 0 if ok else 1


class _HumanI:
    positional = False

    def __init__(self, arena, numeric: bool, inp: TextIO, out: TextIO):
        self.arena, self.numeric, self.inp, self.out = arena, numeric, inp, out

    def __call__(self, pos):
        desc = legal_moves_I(self.arena, pos)
        self.out.write(f"ply {pos.ply}: defend {pos.owner}:{pos.current}\n")
        self.out.write("legal beliefs satisfy:\n" + desc["rows"] + "\n")
        while True:
            self.out.write("I> ")
            self.out.flush()
            line = self.inp.readline()
            if not line:
                return None
            try:
                return parse_move_I(line.strip(), self.numeric)
            except (ValueError, MalformedMeasure) as exc:
                self.out.write(f"unreadable move: {exc}\n")


class _HumanII:
    def __init__(self, numeric: bool, inp: TextIO, out: TextIO):
        self.numeric, self.inp, self.out = numeric, inp, out

    def __call__(self, pos):
        mv: JMoveI = pos.last_I_move
        b = " ".join(str(t) for t in sorted(mv.b, key=point_key))
        self.out.write(f"ply {pos.ply}: I played {mv}\nchoose from b = {{{b}}}\nII> ")
        self.out.flush()
        line = self.inp.readline().strip()
        if self.numeric:
            try:
                return int(line)
            except ValueError:
                return line
        return line


class _Announce:
    def __init__(self, inner, out: TextIO, side: str):
        self.inner, self.out, self.side = inner, out, side
        self.positional = getattr(inner, "positional", False)

    def __call__(self, pos):
        mv = self.inner(pos)
        self.out.write(f"engine {self.side} plays {mv if mv is not None else '(no legal move)'}\n")
        return mv


def cmd_play(args, out: TextIO, inp: TextIO) -> int:
    src = load_source(args.game)
    arena = arena_for(src)
    numeric = isinstance(src, RankedGame)
    s = args.strategy
    if numeric:
        try:
            s = int(s)
        except ValueError:
            raise InputError(f"ranked strategies are naturals, got {s!r}") from None
    try:
        arena.check_strategy(args.player, s)
    except UnknownStrategy as exc:
        raise InputError(str(exc)) from None
    if arena.survives(args.player, s):
        engine_I = synthesize_I(arena, s, args.player)
    else:
        engine_I = FallbackI(arena)
    engine_II = DescentII(arena)
    if args.interactive:
        if args.side == "I":
            strat_I = _HumanI(arena, numeric, inp, out)
            strat_II = _Announce(engine_II, out, "II")
        else:
            strat_I = _Announce(engine_I, out, "I")
            strat_II = _HumanII(numeric, inp, out)
    else:
        strat_I, strat_II = engine_I, engine_II
    rec = play(arena, s, strat_I, strat_II, args.budget, args.player)
    text = format_transcript(rec)
    if args.transcript:
        Path(args.transcript).write_text(text, encoding="utf-8")
    out.write(text)
    problems = replay(arena, rec)
    for p in problems:
        out.write(f"audit: {p}\n")
    if not args.interactive:
        expected = "I" if arena.survives(args.player, s) else "II"
        out.write(f"expected winner {expected}: {'ok' if rec.winner == expected else 'MISMATCH'}\n")
        if rec.winner != expected:
            return 1
    return 1 if problems else 0


def _ranked_gammas(rg: RankedGame) -> list[Ordinal]:
    """Every label at which the enumerated stage set can change, up to the bound."""
    top = max(rg.coeffs)
    span = -(-rg.horizon // rg.modulus) + 1
    out = []
    for a in range(top + 1):
        out += [Ordinal.omega(a, n) for n in range(span + 1)]
    out.append(rg.bound)
    return out


def cmd_ranked_demo(args, out: TextIO) -> int:
    src = load_source(args.ranked)
    if not isinstance(src, RankedGame):
        raise InputError(f"{args.ranked}: expected a ranked-game file")
    trace = run_ranked(src)
    if args.gamma is not None:
        try:
            gammas = [parse_ordinal(args.gamma)]
        except ValueError as exc:
            raise InputError(f"--gamma: {exc}") from None
        if gammas[0] > src.bound:
            raise InputError(f"--gamma {gammas[0]} exceeds the bound {src.bound}")
    else:
        out.write(format_ranked_trace(trace))
        gammas = _ranked_gammas(src)
    mismatches = 0
    for gamma in gammas:
        closed = ranked_stages(src, gamma)
        engine = trace.enumerate(gamma)
        same = closed == engine
        mismatches += not same
        if args.gamma is not None or not same:
            out.write(f"gamma {gamma}\n  closed form: {' '.join(map(str, closed)) or '-'}\n"
                      f"  engine:      {' '.join(map(str, engine)) or '-'}\n")
    out.write(f"convergence ordinal: {trace.convergence_ordinal} (bound {src.bound})\n")
    out.write(f"closed form vs engine: {len(gammas) - mismatches}/{len(gammas)} stage sets agree\n")
    if args.truncated:
        g = truncated_game(src)
        out.write(f"finite truncation to {src.horizon} strategies:\n")
        out.write(format_trace(g, eliminate(g, "RAT")))
    return 1 if mismatches else 0


def _sweep_one(task):
    g, depth, just, opponents, seed = task
    problems = check_fundamental(g, depth) + check_pearce(g)
    if just:
        st = check_justification(g, opponents=opponents, seed=seed, depth=depth)
        problems += st.problems + st.type_problems
    return g, problems


def cmd_verify_ft(args, out: TextIO) -> int:
    values = parse_values(args.values)
    if args.sample is None and args.size == 2:
        games = exhaustive_corpus(2, values)
        total = corpus_size(2, values)
        per = len(values) ** 4
        what = f"{total} games ({per}x{per} matrix pairs, exhaustive)"
    else:
        count = args.sample if args.sample is not None else 2000
        games = sampled_corpus(args.size, values, count, args.seed)
        what = f"{count} sampled {args.size}x{args.size} games (seed {args.seed})"
    tasks = ((g, args.depth, args.justification, args.opponents, args.seed) for g in games)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            results = list(pool.map(_sweep_one, tasks, chunksize=64))
    else:
        results = [_sweep_one(t) for t in tasks]
    bad = [(g, p) for g, p in results if p]
    if not bad:
        out.write(f"all {what}: checks passed\n")
        return 0
    out.write(f"FAILED on {len(bad)} of {len(results)} games; first counterexamples:\n")
    for g, problems in bad[:args.dump]:
        out.write(emit_game(g))
        for p in problems:
            out.write(f"  {p}\n")
    return 1


def _parse_relation(text: str) -> list[tuple[str, str]]:
    pairs = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if len(words) != 2:
            raise GameFormatError(f"expected 'x y', got {line!r}", no)
        pairs.append((words[0], words[1]))
    return pairs


def _parse_measure(text: str) -> FiniteMeasure:
    weights = {}
    for item in text.split():
        if "=" not in item:
            raise ValueError(f"measure entry {item!r} is not point=weight")
        p, w = item.split("=", 1)
        if p in weights:
            raise MalformedMeasure(f"point {p!r} listed twice")
        weights[p] = parse_rational(w)
    return FiniteMeasure(weights)


def cmd_lift(args, out: TextIO) -> int:
    try:
        A = _parse_relation(_read(args.relation))
    except GameFormatError as exc:
        raise InputError(f"{args.relation}: {exc}") from None
    mu = _parse_measure(" ".join(args.measure))
    try:
        nu = lubin_lift(A, mu)
    except ValueError as exc:
        out.write(f"precondition fails: {exc}\n")
        return 1
    for (x, y), w in nu.items():
        out.write(f"({x},{y}) {format_rational(w)}\n")
    return 0


# ---- argument parsing -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rcbr", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="iterated elimination trace")
    p.add_argument("game")
    p.add_argument("--concept", default="rat", type=str.upper, choices=CONCEPTS)
    p.add_argument("--justifications", action="store_true",
                   help="also print the final justifying beliefs")

    p = sub.add_parser("dominance", help="never-best-response vs strict dominance")
    p.add_argument("game")
    p.add_argument("--player", type=int, choices=(1, 2), required=True)
    p.add_argument("--strategy", required=True)

    p = sub.add_parser("certify", help="build and re-check witness hierarchies")
    p.add_argument("game")
    p.add_argument("--depth", type=_positive, default=8)
    p.add_argument("--out", help="directory for witness files (default: stdout)")

    p = sub.add_parser("check", help="validate a witness hierarchy against a game")
    p.add_argument("witness")
    p.add_argument("game")
    p.add_argument("--level", type=_positive)

    p = sub.add_parser("play", help="play the justification game")
    p.add_argument("game", help="game or ranked-game file")
    p.add_argument("--strategy", required=True)
    p.add_argument("--player", type=int, choices=(1, 2), default=1)
    p.add_argument("--as", dest="side", choices=("I", "II"), default="I")
    p.add_argument("--interactive", action="store_true")
    p.add_argument("--budget", type=_positive, default=64)
    p.add_argument("--transcript", help="also write the transcript here")

    p = sub.add_parser("ranked-demo", help="ranked games: closed form vs engine")
    p.add_argument("ranked")
    p.add_argument("--gamma")
    p.add_argument("--truncated", action="store_true",
                   help="also eliminate on the finite truncation, where a top rank class exists")

    p = sub.add_parser("verify-ft", help="fundamental-theorem sweep")
    p.add_argument("--size", type=int, choices=(2, 3), required=True)
    p.add_argument("--values", default="0,1,2")
    p.add_argument("--sample", type=_positive)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=_positive, default=8)
    p.add_argument("--justification", action="store_true",
                   help="also run the justification-game checks per game")
    p.add_argument("--opponents", type=int, default=100)
    p.add_argument("--jobs", type=_positive, default=1)
    p.add_argument("--dump", type=int, default=10, help="counterexamples to print")

    p = sub.add_parser("lift", help="lift a measure along a finite relation")
    p.add_argument("relation", help="file of 'x y' pairs")
    p.add_argument("measure", nargs="+", help="e.g. 0=1/2 1=1/2")
    return ap


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def run(argv: Optional[list[str]] = None, out: TextIO = None, inp: TextIO = None,
        err: TextIO = None) -> int:
    out = out or sys.stdout
    inp = inp or sys.stdin
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {
        "solve": cmd_solve, "dominance": cmd_dominance, "certify": cmd_certify,
        "check": cmd_check, "ranked-demo": cmd_ranked_demo, "verify-ft": cmd_verify_ft,
        "lift": cmd_lift,
    }
    try:
        if args.command == "play":
            return cmd_play(args, out, inp)
        return handlers[args.command](args, out)
    except InputError as exc:
        err.write(f"error: {exc}\n")
        return 2
    except INPUT_ERRORS as exc:
        err.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
