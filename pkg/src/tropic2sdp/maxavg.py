"""Max-average constraint systems over Q ∪ {-inf}.

The IR of the whole pipeline: conjunctions of constraints of the shapes
``x0 <= max(x1..xk)``, ``x0 <= (x1+x2)/2`` and ``x0 = c``.  Sugar shapes
(min upper bounds, constant upper/lower bounds) are desugared by
:func:`normalize`.  A desk-scale feasibility oracle based on exact
downward Kleene iteration lives here as well.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

# Distinguished bottom element of the value domain.  Comparisons between
# float('-inf') and Fraction are exact, so this is a safe sentinel.
NEG_INF = float("-inf")

ExtValue = Union[Fraction, float]


def is_neg_inf(v: ExtValue) -> bool:
    return v == NEG_INF


def ext_max(values: Iterable[ExtValue]) -> ExtValue:
    """Max with the empty-max convention: max() = -inf."""
    out: ExtValue = NEG_INF
    for v in values:
        if v > out:
            out = v
    return out


def ext_avg(a: ExtValue, b: ExtValue) -> ExtValue:
    """(a+b)/2 in the extended domain; -inf absorbs."""
    if is_neg_inf(a) or is_neg_inf(b):
        return NEG_INF
    return (a + b) / 2


# ---------------------------------------------------------------------------
# Constraint shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxLe:
    """x_target <= max(x_args); args may be empty (forces -inf)."""

    target: int
    args: tuple[int, ...]


@dataclass(frozen=True)
class AvgLe:
    """x_target <= (x_a + x_b) / 2."""

    target: int
    a: int
    b: int


@dataclass(frozen=True)
class Const:
    """x_target = value (a finite rational in lowest terms)."""

    target: int
    value: Fraction


@dataclass(frozen=True)
class MinLe:
    """Sugar: x_target <= min(x_args)."""

    target: int
    args: tuple[int, ...]


@dataclass(frozen=True)
class LeConst:
    """Sugar: x_target <= value."""

    target: int
    value: Fraction


@dataclass(frozen=True)
class GeConst:
    """Sugar: x_target >= value."""

    target: int
    value: Fraction


Constraint = Union[MaxLe, AvgLe, Const, MinLe, LeConst, GeConst]
BASE_SHAPES = (MaxLe, AvgLe, Const)


class MaxAvgError(ValueError):
    pass


@dataclass(frozen=True)
class MaxAvgInstance:
    """A conjunction of max-average constraints over n variables.

    ``origins[i]`` records where variable i came from (input name, fresh
    desugaring variable, game node, ...).  ``solution_bound`` is an
    optional provenance hint: a finite rational U such that every solution
    is known to satisfy x_i <= U pointwise (game-derived systems set 1).
    """

    n: int
    constraints: tuple[Constraint, ...]
    origins: tuple[str, ...] = ()
    solution_bound: Optional[Fraction] = None

    def __post_init__(self):
        if self.origins and len(self.origins) != self.n:
            raise MaxAvgError("origins length must match variable count")
        for c in self.constraints:
            idxs = [c.target]
            if isinstance(c, (MaxLe, MinLe)):
                idxs += list(c.args)
            elif isinstance(c, AvgLe):
                idxs += [c.a, c.b]
            for i in idxs:
                if not (0 <= i < self.n):
                    raise MaxAvgError(f"variable index {i} out of range (n={self.n})")

    @property
    def is_normalized(self) -> bool:
        return all(isinstance(c, BASE_SHAPES) for c in self.constraints)

    @property
    def source_var_count(self) -> int:
        """Variable count before desugaring introduced fresh constants."""
        if not self.origins:
            return self.n
        fresh = sum(
            1 for o in self.origins if o.startswith(("le_const(", "ge_const("))
        )
        return self.n - fresh

    def constants(self) -> list[Fraction]:
        """Finite constants pinned by Const constraints (-inf excluded)."""
        return [
            Fraction(c.value)
            for c in self.constraints
            if isinstance(c, Const) and not is_neg_inf(c.value)
        ]


def _origins(inst: MaxAvgInstance) -> list[str]:
    if inst.origins:
        return list(inst.origins)
    return [f"x{i}" for i in range(inst.n)]


def normalize(inst: MaxAvgInstance) -> MaxAvgInstance:
    """Desugar MinLe / LeConst / GeConst into the three base shapes.

    Fresh variables are appended after the original ones; their origins
    record the sugar constraint they came from.  Idempotent on already
    normal instances.
    """
    if inst.is_normalized:
        return inst
    n = inst.n
    origins = _origins(inst)
    out: list[Constraint] = []
    for c in inst.constraints:
        if isinstance(c, BASE_SHAPES):
            out.append(c)
        elif isinstance(c, MinLe):
            # x <= min(a1..ak)  ==  x <= max(a1) /\ ... /\ x <= max(ak)
            for a in c.args:
                out.append(MaxLe(c.target, (a,)))
            if not c.args:
                out.append(MaxLe(c.target, ()))
        elif isinstance(c, LeConst):
            y = n
            n += 1
            origins.append(f"le_const({origins[c.target]},{c.value})")
            out.append(Const(y, Fraction(c.value)))
            out.append(MaxLe(c.target, (y,)))
        elif isinstance(c, GeConst):
            y = n
            n += 1
            origins.append(f"ge_const({origins[c.target]},{c.value})")
            out.append(Const(y, Fraction(c.value)))
            out.append(MaxLe(y, (c.target,)))
        else:  # pragma: no cover
            raise MaxAvgError(f"unknown constraint {c!r}")
    return MaxAvgInstance(n, tuple(out), tuple(origins), inst.solution_bound)


def check_assignment(inst: MaxAvgInstance, assignment: Sequence[ExtValue]) -> bool:
    """Exact satisfaction check under the extended-arithmetic conventions."""
    if len(assignment) != inst.n:
        raise MaxAvgError("assignment length mismatch")
    a = assignment
    for c in inst.constraints:
        if isinstance(c, MaxLe):
            if not a[c.target] <= ext_max(a[i] for i in c.args):
                return False
        elif isinstance(c, AvgLe):
            if not a[c.target] <= ext_avg(a[c.a], a[c.b]):
                return False
        elif isinstance(c, Const):
            if is_neg_inf(a[c.target]) or a[c.target] != c.value:
                return False
        elif isinstance(c, MinLe):
            if c.args:
                if not all(a[c.target] <= a[i] for i in c.args):
                    return False
            elif not is_neg_inf(a[c.target]):
                return False
        elif isinstance(c, LeConst):
            if not a[c.target] <= c.value:
                return False
        elif isinstance(c, GeConst):
            if is_neg_inf(a[c.target]) or not a[c.target] >= c.value:
                return False
    return True


# ---------------------------------------------------------------------------
# Feasibility oracle
# ---------------------------------------------------------------------------

FEASIBLE = "feasible"
INFEASIBLE = "infeasible"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class OracleResult:
    status: str
    witness: Optional[tuple[ExtValue, ...]] = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.status == FEASIBLE


def _upper_bounds(inst: MaxAvgInstance) -> list[Optional[ExtValue]]:
    """Propagate upper bounds from constants; None = not derivable."""
    ub: list[Optional[ExtValue]] = [None] * inst.n
    for c in inst.constraints:
        if isinstance(c, Const):
            if ub[c.target] is None or c.value < ub[c.target]:
                ub[c.target] = c.value
    for _ in range(inst.n):
        changed = False
        for c in inst.constraints:
            new: Optional[ExtValue] = None
            if isinstance(c, MaxLe):
                vals = [ub[i] for i in c.args]
                if all(v is not None for v in vals):
                    new = ext_max(vals)  # type: ignore[arg-type]
            elif isinstance(c, AvgLe):
                va, vb = ub[c.a], ub[c.b]
                if va is not None and vb is not None:
                    new = ext_avg(va, vb)
            if new is not None:
                cur = ub[c.target]
                if cur is None or new < cur:
                    ub[c.target] = new
                    changed = True
        if not changed:
            break
    return ub


# descent grid: fine enough that any gap the callers rely on dwarfs it
_GRID = 1 << 512


def oracle_feasible(inst: MaxAvgInstance, budget: int = 10_000) -> OracleResult:
    """Decide feasibility by exact downward Kleene iteration.

    Starts from propagated upper bounds (variables without a derivable
    bound are pinned at the largest finite constant, or at the instance's
    ``solution_bound`` hint) and sweeps ``x <- min(x, rhs)`` until a fixed
    point.  Because the descent can converge without terminating (cyclic
    averaging), each round also snaps the current vector to small-
    denominator rationals and accepts any snap that passes
    :func:`check_assignment`.

    Infeasibility is reported when some ``x = c`` constraint is driven
    strictly below c.  That verdict is only sound when the starting vector
    dominates every solution, i.e. when all bounds were derivable or the
    instance carries a ``solution_bound``; otherwise it degrades to
    ``unknown``.
    """
    if budget <= 0:
        raise MaxAvgError("budget must be positive")
    if not inst.is_normalized:
        inst = normalize(inst)
    consts = inst.constants()
    ub = _upper_bounds(inst)
    pinned = [i for i in range(inst.n) if ub[i] is None]
    if inst.solution_bound is not None:
        top: Fraction = inst.solution_bound
        infeasible_sound = True
    else:
        top = max(consts) if consts else Fraction(0)
        infeasible_sound = not pinned
    x: list[ExtValue] = [ub[i] if ub[i] is not None else top for i in range(inst.n)]

    snap_ladder = [1 << k for k in (2, 4, 8, 16, 24, 32, 48, 64, 96, 128)]
    for sweep in range(budget):
        changed = False
        for c in inst.constraints:
            if isinstance(c, Const):
                cur = x[c.target]
                if cur > c.value:
                    x[c.target] = c.value
                    changed = True
                elif cur < c.value:
                    if infeasible_sound:
                        # cur can carry a denominator with thousands of
                        # digits after repeated halving; do not render it
                        return OracleResult(
                            INFEASIBLE,
                            detail=f"constant x{c.target}={c.value} forced strictly below its pinned value",
                        )
                    return OracleResult(UNKNOWN, detail="descent below constant with unbounded start")
            elif isinstance(c, MaxLe):
                rhs = ext_max(x[i] for i in c.args)
                if rhs < x[c.target]:
                    x[c.target] = rhs
                    changed = True
            else:  # AvgLe
                rhs = ext_avg(x[c.a], x[c.b])
                if rhs < x[c.target]:
                    x[c.target] = rhs
                    changed = True
        if not changed:
            w = tuple(x)
            if check_assignment(inst, w):
                return OracleResult(FEASIBLE, w)
            return OracleResult(UNKNOWN, detail="fixed point fails exact check")
        # Cap denominator growth by rounding up to a fine dyadic grid.
        # Rounding up keeps x dominating every solution (the invariant the
        # infeasible verdict relies on); feasible verdicts are re-verified.
        for i, v in enumerate(x):
            if not is_neg_inf(v):
                f = Fraction(v)
                if f.denominator > _GRID:
                    x[i] = Fraction(-((-f.numerator * _GRID) // f.denominator), _GRID)
        # Snap-and-verify acceleration: geometric descent never reaches
        # rational fixed points of cyclic averaging, but once close enough
        # the snapped vector is exact and is verified independently.
        if sweep % 4 == 3:
            for bound in snap_ladder:
                snapped = tuple(
                    v if is_neg_inf(v) else Fraction(v).limit_denominator(bound) for v in x
                )
                if check_assignment(inst, snapped):
                    return OracleResult(FEASIBLE, snapped)
    return OracleResult(UNKNOWN, detail="sweep budget exhausted")


# ---------------------------------------------------------------------------
# Text / JSON interchange
# ---------------------------------------------------------------------------

_KEYWORDS = {"LEMAX", "LEAVG", "CONST", "LEMIN", "LECONST", "GECONST"}


def parse_fraction(tok: str) -> Fraction:
    return Fraction(tok)


def format_fraction(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}" if f.denominator != 1 else str(f.numerator)


def parse_maxavg(text: str) -> MaxAvgInstance:
    """Parse the line format: LEMAX/LEAVG/CONST plus sugar keywords.

    An optional header ``maxavg <n>`` fixes the variable count; otherwise
    it is inferred from the largest index used.
    """
    constraints: list[Constraint] = []
    n_decl: Optional[int] = None
    max_idx = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0].upper()
        try:
            if kw == "MAXAVG":
                n_decl = int(toks[1])
                continue
            if kw not in _KEYWORDS:
                raise MaxAvgError(f"line {lineno}: unknown keyword {toks[0]!r}")
            if kw == "LEMAX":
                c: Constraint = MaxLe(int(toks[1]), tuple(int(t) for t in toks[2:]))
            elif kw == "LEMIN":
                c = MinLe(int(toks[1]), tuple(int(t) for t in toks[2:]))
            elif kw == "LEAVG":
                if len(toks) != 4:
                    raise MaxAvgError(f"line {lineno}: LEAVG needs 3 indices")
                c = AvgLe(int(toks[1]), int(toks[2]), int(toks[3]))
            elif kw == "CONST":
                c = Const(int(toks[1]), parse_fraction(toks[2]))
            elif kw == "LECONST":
                c = LeConst(int(toks[1]), parse_fraction(toks[2]))
            else:
                c = GeConst(int(toks[1]), parse_fraction(toks[2]))
        except (ValueError, IndexError) as exc:
            if isinstance(exc, MaxAvgError):
                raise
            raise MaxAvgError(f"line {lineno}: {exc}") from exc
        idxs = [c.target] + (
            list(c.args) if isinstance(c, (MaxLe, MinLe)) else [c.a, c.b] if isinstance(c, AvgLe) else []
        )
        max_idx = max(max_idx, *idxs)
        constraints.append(c)
    if n_decl is not None and max_idx >= n_decl:
        raise MaxAvgError(
            f"index {max_idx} out of range for declared count {n_decl}"
        )
    n = n_decl if n_decl is not None else max_idx + 1
    return MaxAvgInstance(n, tuple(constraints))


def serialize_maxavg(inst: MaxAvgInstance) -> str:
    lines = [f"maxavg {inst.n}"]
    for c in inst.constraints:
        if isinstance(c, MaxLe):
            lines.append(" ".join(["LEMAX", str(c.target), *map(str, c.args)]))
        elif isinstance(c, MinLe):
            lines.append(" ".join(["LEMIN", str(c.target), *map(str, c.args)]))
        elif isinstance(c, AvgLe):
            lines.append(f"LEAVG {c.target} {c.a} {c.b}")
        elif isinstance(c, Const):
            lines.append(f"CONST {c.target} {format_fraction(c.value)}")
        elif isinstance(c, LeConst):
            lines.append(f"LECONST {c.target} {format_fraction(c.value)}")
        else:
            lines.append(f"GECONST {c.target} {format_fraction(c.value)}")
    return "\n".join(lines) + "\n"


def to_json(inst: MaxAvgInstance) -> str:
    def enc(c: Constraint) -> dict:
        if isinstance(c, MaxLe):
            return {"op": "lemax", "target": c.target, "args": list(c.args)}
        if isinstance(c, MinLe):
            return {"op": "lemin", "target": c.target, "args": list(c.args)}
        if isinstance(c, AvgLe):
            return {"op": "leavg", "target": c.target, "args": [c.a, c.b]}
        kind = {Const: "const", LeConst: "leconst", GeConst: "geconst"}[type(c)]
        return {"op": kind, "target": c.target, "value": format_fraction(c.value)}

    return json.dumps(
        {"n": inst.n, "constraints": [enc(c) for c in inst.constraints], "origins": list(inst.origins)},
        indent=1,
    )


def from_json(text: str) -> MaxAvgInstance:
    doc = json.loads(text)
    cons: list[Constraint] = []
    for c in doc["constraints"]:
        op, t = c["op"], c["target"]
        if op == "lemax":
            cons.append(MaxLe(t, tuple(c["args"])))
        elif op == "lemin":
            cons.append(MinLe(t, tuple(c["args"])))
        elif op == "leavg":
            cons.append(AvgLe(t, c["args"][0], c["args"][1]))
        elif op == "const":
            cons.append(Const(t, Fraction(c["value"])))
        elif op == "leconst":
            cons.append(LeConst(t, Fraction(c["value"])))
        elif op == "geconst":
            cons.append(GeConst(t, Fraction(c["value"])))
        else:
            raise MaxAvgError(f"unknown op {op!r}")
    return MaxAvgInstance(doc["n"], tuple(cons), tuple(doc.get("origins", ())))
