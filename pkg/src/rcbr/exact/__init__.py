from .lp import (
    EQ, LE, LT, Constraint, DimensionError, LinearSystem, LPResult,
    constraint, lp_feasible, lp_optimize,
)
from .ordinal import Ordinal, OrdinalOverflow, ordinal_cmp, ordinal_succ, parse_ordinal
from .rational import Rational, format_rational, parse_rational

__all__ = [
    "EQ", "LE", "LT", "Constraint", "DimensionError", "LinearSystem", "LPResult",
    "constraint", "lp_feasible", "lp_optimize",
    "Ordinal", "OrdinalOverflow", "ordinal_cmp", "ordinal_succ", "parse_ordinal",
    "Rational", "format_rational", "parse_rational",
]
