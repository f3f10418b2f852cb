"""Numeric cross-check harness for tropic2sdp SDP feasibility instances."""

from .corpus import build_corpus
from .crosscheck import CrossCheckResult, cross_check, to_csv, to_markdown
from .pin import pin_bounds
from .sdpa import SDPAParseError, SDPAProblem, parse_sdpa
from .solve import (
    FEASIBLE,
    INCONCLUSIVE,
    INFEASIBLE,
    SolveReport,
    solve_problem,
    solve_sdpa,
)

__version__ = "0.1.0"

__all__ = [
    "CrossCheckResult",
    "FEASIBLE",
    "INCONCLUSIVE",
    "INFEASIBLE",
    "SDPAParseError",
    "SDPAProblem",
    "SolveReport",
    "build_corpus",
    "cross_check",
    "parse_sdpa",
    "pin_bounds",
    "solve_problem",
    "solve_sdpa",
    "to_csv",
    "to_markdown",
]
