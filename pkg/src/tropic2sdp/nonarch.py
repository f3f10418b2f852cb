"""Lift of max-average constraints to a formal-parameter constraint system.

Constraints over variables valued in nonnegative formal monomials
``c * t^q`` (t a large formal parameter): a max bound becomes a sum bound,
an averaging bound becomes a geometric-mean bound, and a constant pins a
variable to a pure power of t.  Witnesses are monomial vectors; both
directions of the correspondence with the source system are decidable
exactly at that level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .maxavg import (
    NEG_INF,
    AvgLe,
    Const,
    ExtValue,
    MaxAvgInstance,
    MaxLe,
    is_neg_inf,
)


@dataclass(frozen=True)
class Monomial:
    """c * t^e with c >= 0; the zero monomial (c = 0) has valuation -inf."""

    coeff: Fraction
    exp: Fraction = Fraction(0)

    def __post_init__(self):
        if self.coeff < 0:
            raise ValueError("monomial coefficients must be nonnegative")

    @property
    def is_zero(self) -> bool:
        return self.coeff == 0

    def val(self) -> ExtValue:
        return NEG_INF if self.is_zero else self.exp

    @staticmethod
    def zero() -> "Monomial":
        return Monomial(Fraction(0))

    @staticmethod
    def power(exp: Fraction) -> "Monomial":
        return Monomial(Fraction(1), Fraction(exp))


@dataclass(frozen=True)
class SumGe:
    """x_target <= x_args[0] + ... + x_args[k-1]."""

    target: int
    args: tuple[int, ...]


@dataclass(frozen=True)
class SquareLe:
    """x_target^2 <= x_a * x_b."""

    target: int
    a: int
    b: int


@dataclass(frozen=True)
class PowerEq:
    """x_target = t^exponent."""

    target: int
    exponent: Fraction


LiftedConstraint = Union[SumGe, SquareLe, PowerEq]


@dataclass(frozen=True)
class NonArchSystem:
    """Lifted system; all variables are implicitly constrained >= 0.

    ``provenance[j]`` is the index of the source constraint that produced
    constraint j.
    """

    n: int
    constraints: tuple[LiftedConstraint, ...]
    provenance: tuple[int, ...]

    def __post_init__(self):
        if len(self.provenance) != len(self.constraints):
            raise ValueError("provenance must cover every constraint")


def lift(inst: MaxAvgInstance) -> NonArchSystem:
    """Translate a normalized instance constraint by constraint."""
    if not inst.is_normalized:
        raise ValueError("lift expects a normalized instance")
    out: list[LiftedConstraint] = []
    prov: list[int] = []
    for j, c in enumerate(inst.constraints):
        if isinstance(c, MaxLe):
            out.append(SumGe(c.target, c.args))
        elif isinstance(c, AvgLe):
            out.append(SquareLe(c.target, c.a, c.b))
        elif isinstance(c, Const):
            if is_neg_inf(c.value):
                # x = -inf lowers to x <= empty max, i.e. the zero series
                out.append(SumGe(c.target, ()))
            else:
                out.append(PowerEq(c.target, Fraction(c.value)))
        else:  # pragma: no cover
            raise ValueError(f"unexpected constraint {c!r}")
        prov.append(j)
    return NonArchSystem(inst.n, tuple(out), tuple(prov))


def monomial_witness(assignment: Sequence[ExtValue]) -> tuple[Monomial, ...]:
    """Map a value vector a to (t^{a_1}, ..., t^{a_n}); -inf maps to 0."""
    return tuple(
        Monomial.zero() if is_neg_inf(v) else Monomial.power(Fraction(v))
        for v in assignment
    )


def _sum_leading(monos: Sequence[Monomial]) -> Monomial:
    """Leading term of a sum of nonnegative monomials."""
    best = NEG_INF
    coeff = Fraction(0)
    for m in monos:
        if m.is_zero:
            continue
        if m.exp > best:
            best, coeff = m.exp, m.coeff
        elif m.exp == best:
            coeff += m.coeff
    return Monomial.zero() if is_neg_inf(best) else Monomial(coeff, Fraction(best))


def _mono_le(a: Monomial, b: Monomial) -> bool:
    """a <= b in the ordered field, for nonnegative monomials."""
    if a.is_zero:
        return True
    if b.is_zero:
        return False
    if a.exp != b.exp:
        return a.exp < b.exp
    return a.coeff <= b.coeff


def verify_nonarch(sys: NonArchSystem, witness: Sequence[Monomial]) -> bool:
    """Exact check of a monomial witness against every constraint."""
    if len(witness) != sys.n:
        raise ValueError("witness length mismatch")
    w = witness
    for c in sys.constraints:
        if isinstance(c, SumGe):
            if not _mono_le(w[c.target], _sum_leading([w[i] for i in c.args])):
                return False
        elif isinstance(c, SquareLe):
            lhs = w[c.target]
            a, b = w[c.a], w[c.b]
            if lhs.is_zero:
                continue
            if a.is_zero or b.is_zero:
                return False
            if 2 * lhs.exp != a.exp + b.exp:
                if not 2 * lhs.exp < a.exp + b.exp:
                    return False
            elif not lhs.coeff * lhs.coeff <= a.coeff * b.coeff:
                return False
        else:  # PowerEq
            m = w[c.target]
            if m.is_zero or m.coeff != 1 or m.exp != c.exponent:
                return False
    return True


def valuations(witness: Sequence[Monomial]) -> tuple[ExtValue, ...]:
    return tuple(m.val() for m in witness)


def to_json(sys: NonArchSystem) -> str:
    def enc(c: LiftedConstraint) -> dict:
        if isinstance(c, SumGe):
            return {"op": "sum_ge", "target": c.target, "args": list(c.args)}
        if isinstance(c, SquareLe):
            return {"op": "square_le", "target": c.target, "args": [c.a, c.b]}
        return {"op": "power_eq", "target": c.target, "exponent": str(c.exponent)}

    return json.dumps(
        {
            "n": sys.n,
            "constraints": [enc(c) for c in sys.constraints],
            "provenance": list(sys.provenance),
            "nonnegative": True,
        },
        indent=1,
    )
