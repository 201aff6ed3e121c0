"""Exact truncated computations with combinatorial (bi-)multiple Eisenstein series."""
from .eds import BetaSolution, solve_eds, verify_eds
from .eisenstein import EisensteinContext, g_bruteforce, parse_index
from .exact import LinForm, QSeries, TruncationParams
from .poly import BiIndex, PolyXY
from .relations import REGISTRY, check_identity, run_all
from .report import RelationReport

__version__ = "0.1.0"

__all__ = [
    "BetaSolution", "BiIndex", "EisensteinContext", "LinForm", "PolyXY", "QSeries", "REGISTRY",
    "RelationReport", "TruncationParams", "check_identity", "g_bruteforce", "parse_index", "run_all",
    "solve_eds", "verify_eds",
]
