"""Numeric feasibility solving of parsed SDPA instances.

Two programs are used.  The margin program

    minimize s  subject to  sum_i x_i F_i - B + s*I >= 0,  s >= 0,

has optimum 0 exactly when the instance is feasible, and its optimum
bounds how far the instance is from feasibility.  On well-scaled
instances it settles near 0 and the verdict is immediate.  Instances
whose witnesses span many orders of magnitude (large K) defeat the
margin objective: the optimum sits at a degenerate boundary point and
interior-point accuracy degrades to ~1e-4.  For those the pure
feasibility program (no objective) is solved instead; the homogeneous
embedding either returns an infeasibility certificate or a candidate
point, and the candidate is verified directly by its relative defect,
the worst negative eigenvalue of any pencil block scaled by that
block's magnitude.

Classification against the tolerance: a verified candidate with defect
at most ``tolerance`` is feasible; an infeasibility certificate with a
margin of at least ``INFEASIBLE_FACTOR * tolerance`` is infeasible;
anything else (or solver failure on all fronts) is inconclusive.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass
from typing import Optional

import cvxpy as cp
import numpy as np

from .sdpa import SDPAProblem, parse_sdpa

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
INCONCLUSIVE = "inconclusive"

INFEASIBLE_FACTOR = 100.0

# tried in order; Clarabel is an interior-point method and much more
# accurate on these small instances, SCS is the fallback
SOLVER_ORDER = ("CLARABEL", "SCS")

_CERTIFIED = (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE)
_SOLVED = (cp.OPTIMAL, cp.OPTIMAL_INACCURATE)


@dataclass(frozen=True)
class SolveReport:
    instance: str
    verdict: str
    residual: float
    tolerance: float
    wall_time: float
    k_bits: Optional[int]
    oracle: Optional[str]
    solver: Optional[str]

    @property
    def agrees(self) -> Optional[bool]:
        if self.oracle in (FEASIBLE, INFEASIBLE):
            return self.verdict == self.oracle
        return None

    def row(self) -> dict:
        return {
            "instance": self.instance,
            "verdict": self.verdict,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "wall_time": round(self.wall_time, 4),
            "K_bits": self.k_bits,
            "oracle": self.oracle,
            "solver": self.solver,
            "agrees": self.agrees,
        }


def _block_matrices(prob: SDPAProblem) -> list[tuple[int, dict[int, np.ndarray]]]:
    """Per block: (signed size, matno -> dense symmetric matrix or diagonal)."""
    out: list[tuple[int, dict[int, np.ndarray]]] = []
    for size in prob.block_sizes:
        out.append((size, {}))
    for matno, blk, i, j, val in prob.entries:
        size, mats = out[blk - 1]
        if size < 0:
            vec = mats.setdefault(matno, np.zeros(-size))
            vec[i - 1] = val
        else:
            mat = mats.setdefault(matno, np.zeros((size, size)))
            mat[i - 1, j - 1] = val
            mat[j - 1, i - 1] = val
    return out


def _pencil_at(block_mats, n_vars: int, xv) -> list[np.ndarray]:
    """Evaluate every pencil block at x; diagonal blocks become vectors."""
    out = []
    for size, mats in block_mats:
        dim = abs(size)
        const = mats.get(0)
        m = -const if const is not None else (
            np.zeros(dim) if size < 0 else np.zeros((dim, dim))
        )
        for matno, mat in mats.items():
            if matno == 0:
                continue
            m = m + xv[matno - 1] * mat
        out.append(m)
    return out


def relative_defect(block_mats, n_vars: int, xv) -> float:
    """Worst negative eigenvalue over blocks, scaled by block magnitude."""
    worst = 0.0
    for m in _pencil_at(block_mats, n_vars, xv):
        mag = max(float(np.abs(m).max(initial=0.0)), 1.0)
        if m.ndim == 1:
            lam = float(m.min(initial=0.0))
        else:
            lam = float(np.linalg.eigvalsh(m)[0]) if m.size else 0.0
        worst = max(worst, max(-lam / mag, 0.0))
    return worst


def build_margin_problem(prob: SDPAProblem):
    """The margin program over (x, s); returns (cvxpy problem, x, s)."""
    x = cp.Variable(prob.n_vars) if prob.n_vars else None
    s = cp.Variable(nonneg=True)
    constraints = []
    for size, mats in _block_matrices(prob):
        dim = abs(size)
        const = mats.get(0)
        expr = -const if const is not None else (
            np.zeros(dim) if size < 0 else np.zeros((dim, dim))
        )
        for matno, mat in mats.items():
            if matno == 0:
                continue
            expr = expr + x[matno - 1] * mat
        if size < 0:
            constraints.append(expr + s >= 0)
        else:
            constraints.append(expr + s * np.eye(dim) >> 0)
    return cp.Problem(cp.Minimize(s), constraints), x, s


def _build_feasibility_problem(prob: SDPAProblem, scale=None):
    """Pure feasibility program; ``scale`` rescales variables x = scale * y."""
    y = cp.Variable(prob.n_vars) if prob.n_vars else None
    x = y if scale is None else cp.multiply(scale, y)
    constraints = []
    for size, mats in _block_matrices(prob):
        dim = abs(size)
        const = mats.get(0)
        expr = -const if const is not None else (
            np.zeros(dim) if size < 0 else np.zeros((dim, dim))
        )
        for matno, mat in mats.items():
            if matno == 0:
                continue
            expr = expr + x[matno - 1] * mat
        constraints.append(expr >= 0 if size < 0 else expr >> 0)
    return cp.Problem(cp.Minimize(0), constraints), y


def _solve(problem: cp.Problem, solver: str) -> Optional[str]:
    kwargs = {}
    if solver == "CLARABEL":
        kwargs = {"tol_gap_abs": 1e-10, "tol_gap_rel": 1e-10, "tol_feas": 1e-10}
    elif solver == "SCS":
        kwargs = {"eps": 1e-9, "max_iters": 200_000}
    try:
        with warnings.catch_warnings():
            # inaccurate solutions are verified directly, not warned about
            warnings.simplefilter("ignore", UserWarning)
            problem.solve(solver=solver, **kwargs)
    except (cp.SolverError, Exception):
        return None
    return problem.status


def classify(residual: float, tolerance: float) -> str:
    if residual <= tolerance:
        return FEASIBLE
    if residual >= INFEASIBLE_FACTOR * tolerance:
        return INFEASIBLE
    return INCONCLUSIVE


def _margin_pass(prob: SDPAProblem):
    """Optimal margin s and candidate x, or (inf, None, None) on failure."""
    problem, x, s = build_margin_problem(prob)
    for solver in SOLVER_ORDER:
        if solver not in cp.installed_solvers():
            continue
        status = _solve(problem, solver)
        if status in _SOLVED and s.value is not None:
            xv = x.value if x is not None else np.zeros(0)
            return float(s.value), xv, solver
    return float("inf"), None, None


def _feasibility_pass(prob: SDPAProblem, scale=None):
    """(status, candidate x, solver) from the pure feasibility program."""
    problem, y = _build_feasibility_problem(prob, scale)
    for solver in SOLVER_ORDER:
        if solver not in cp.installed_solvers():
            continue
        status = _solve(problem, solver)
        if status in _CERTIFIED:
            return status, None, solver
        if status in _SOLVED and (y is None or y.value is not None):
            yv = y.value if y is not None else np.zeros(0)
            xv = yv if scale is None else scale * yv
            return status, xv, solver
    return None, None, None


def solve_problem(
    prob: SDPAProblem, tolerance: float = 1e-7, instance: str = "<memory>"
) -> SolveReport:
    t0 = time.perf_counter()
    params = prob.metadata.get("params", {})
    k_bits = params.get("K_bits")
    oracle = prob.metadata.get("oracle")

    def report(verdict, residual, solver):
        return SolveReport(
            instance, verdict, residual, tolerance,
            time.perf_counter() - t0, k_bits, oracle, solver,
        )

    if prob.n_blocks == 0:
        # nothing to satisfy
        return report(FEASIBLE, 0.0, None)

    block_mats = _block_matrices(prob)
    margin, xv, margin_solver = _margin_pass(prob)
    defect = relative_defect(block_mats, prob.n_vars, xv) if xv is not None else float("inf")
    if defect <= tolerance:
        return report(FEASIBLE, defect, margin_solver)

    def infeasible_report(solver):
        verdict = INFEASIBLE if margin >= INFEASIBLE_FACTOR * tolerance else INCONCLUSIVE
        return report(verdict, margin, solver)

    # margin objective stalls on boundary-only feasible sets; fall back to
    # the pure feasibility program and judge its certificate or candidate
    best_defect, best_cand = defect, xv
    inaccurate_certificate = None
    status, cand, solver = _feasibility_pass(prob)
    if status == cp.INFEASIBLE:
        return infeasible_report(solver)
    if status == cp.INFEASIBLE_INACCURATE:
        inaccurate_certificate = solver
    if cand is not None:
        d = relative_defect(block_mats, prob.n_vars, cand)
        if d <= tolerance:
            return report(FEASIBLE, d, solver)
        if d < best_defect:
            best_defect, best_cand = d, cand

    # one rescaled retry: variables normalized to the best candidate so far
    if best_cand is not None:
        scale = np.where(np.abs(best_cand) > 1e-30, np.abs(best_cand), 1.0)
        status2, cand2, solver2 = _feasibility_pass(prob, scale)
        if status2 == cp.INFEASIBLE:
            return infeasible_report(solver2)
        if status2 == cp.INFEASIBLE_INACCURATE and inaccurate_certificate is None:
            inaccurate_certificate = solver2
        if cand2 is not None:
            d2 = relative_defect(block_mats, prob.n_vars, cand2)
            if d2 <= tolerance:
                return report(FEASIBLE, d2, solver2)
            best_defect = min(best_defect, d2)

    # an inaccurate certificate only counts once every feasibility attempt
    # has failed to produce a verifiable candidate
    if inaccurate_certificate is not None:
        return infeasible_report(inaccurate_certificate)
    if best_cand is None and math.isinf(margin):
        # nonconvergence is a verdict, not a crash
        return report(INCONCLUSIVE, float("nan"), None)
    return report(INCONCLUSIVE, min(best_defect, margin), margin_solver)


def solve_sdpa(path: str, tolerance: float = 1e-7) -> SolveReport:
    with open(path) as fh:
        prob = parse_sdpa(fh.read())
    return solve_problem(prob, tolerance, instance=path)
