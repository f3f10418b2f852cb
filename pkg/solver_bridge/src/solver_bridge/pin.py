"""Variable pinning bounds over a JSON-format instance.

The JSON interchange format names every variable, so the extremal values
min/max x_name over the spectrahedron can be computed directly.  Used to
confirm that the power-of-two gadget really pins its output.
"""

from __future__ import annotations

import json
import warnings
from fractions import Fraction

import cvxpy as cp
import numpy as np


class PinError(ValueError):
    pass


def _load(text: str):
    doc = json.loads(text)
    if doc.get("schema") != "tropic2sdp/1":
        raise PinError(f"unsupported schema {doc.get('schema')!r}")
    names = [v["name"] for v in doc["variables"]]
    return doc, names


def _constraints(doc, names, x):
    index = {name: i for i, name in enumerate(names)}

    def dense(rows, dim):
        mat = np.zeros((dim, dim))
        for r, c, v in rows:
            val = float(Fraction(v))
            mat[r, c] = val
            mat[c, r] = val
        return mat

    cons = []
    for blk in doc["blocks"]:
        dim = blk["dim"]
        # block value is sum_i x_i * coeffs_i minus the constant side
        expr = -dense(blk["const"], dim)
        for var, rows in blk["coeffs"].items():
            expr = expr + x[index[var]] * dense(rows, dim)
        if dim == 1:
            cons.append(expr >= 0)
        else:
            cons.append(expr >> 0)
    return cons


def _extremum(doc, names, target_idx, sense, scale=None):
    x = cp.Variable(len(names))
    xs = x if scale is None else cp.multiply(scale, x)
    cons = _constraints(doc, names, xs)
    target = xs[target_idx]
    objective = cp.Minimize(target) if sense == "min" else cp.Maximize(target)
    problem = cp.Problem(objective, cons)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        problem.solve(
            solver="CLARABEL", tol_gap_abs=1e-13, tol_gap_rel=1e-13, tol_feas=1e-13
        )
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise PinError(f"solver status {problem.status}")
    vals = x.value if scale is None else scale * x.value
    return float(problem.value), vals


def pin_bounds(text: str, var_name: str) -> tuple[float, float]:
    """(min, max) of the named variable over the instance's spectrahedron."""
    doc, names = _load(text)
    if var_name not in names:
        raise PinError(f"unknown variable {var_name!r}")
    idx = names.index(var_name)
    out = []
    for sense in ("min", "max"):
        value, vals = _extremum(doc, names, idx, sense)
        # Gadget variables span many orders of magnitude, which ruins the
        # solver's conditioning.  Re-solve with each variable scaled by the
        # first pass's solution so the second pass works near magnitude one.
        scale = np.where(np.abs(vals) > 1e-30, np.abs(vals), 1.0)
        value, _ = _extremum(doc, names, idx, sense, scale)
        out.append(value)
    return out[0], out[1]
