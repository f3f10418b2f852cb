"""Realization parameters for substituting the formal parameter by 2^K.

W measures the constants of the instance, D clears their denominators and
K = 2 * D * W^(M*n) is the exponent of the substituted base 2^K.  K has
polynomially many bits even though 2^K is doubly exponential; every
constant c then maps to the integer exponent c*K.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .maxavg import Const, MaxAvgInstance, is_neg_inf


class RealizeError(ValueError):
    pass


@dataclass(frozen=True)
class RealizationParams:
    w: int
    d: int
    m: int
    n: int
    k: int
    overridden: bool = False

    def __post_init__(self):
        if self.k % self.d != 0:
            raise RealizeError("D must divide K")

    def metadata(self) -> dict:
        return {
            "W": self.w,
            "D": self.d,
            "M": self.m,
            "n": self.n,
            "K_bits": self.k.bit_length(),
            "overridden": self.overridden,
        }


def compute_params(
    inst: MaxAvgInstance, m: int, override_k: int | None = None
) -> RealizationParams:
    """W = 2 + max(|p|+q) over constants p/q, D = prod q, K = 2*D*W^(M*n).

    Constant-free instances fall back to W = 2, D = 1.  ``override_k``
    substitutes a user-chosen K (still required to be divisible by D);
    the result is tagged so emitted metadata can flag the unsound
    threshold.
    """
    if m < 1:
        raise RealizeError("M must be >= 1")
    consts = inst.constants()
    w = 2 + max((abs(c.numerator) + c.denominator for c in consts), default=0)
    d = prod(c.denominator for c in consts)
    # n counts the variables of the source system; fresh variables minted
    # while desugaring threshold constraints do not enlarge the exponent
    n = inst.source_var_count
    if override_k is not None:
        if override_k < 1 or override_k % d != 0:
            raise RealizeError(f"override K must be a positive multiple of D={d}")
        return RealizationParams(w, d, m, n, override_k, overridden=True)
    k = 2 * d * w ** (m * n)
    return RealizationParams(w, d, m, n, k)


def integer_exponents(
    params: RealizationParams, inst: MaxAvgInstance
) -> dict[int, tuple[int, ...]]:
    """Map each Const target variable to its integer exponents c*K.

    A variable may carry several (possibly contradictory) constants; all
    of them are kept, so downstream assembly preserves infeasibility.
    """
    out: dict[int, tuple[int, ...]] = {}
    for c in inst.constraints:
        if not isinstance(c, Const) or is_neg_inf(c.value):
            continue
        e = Fraction(c.value) * params.k
        if e.denominator != 1:
            raise RealizeError(
                f"exponent {c.value}*K is not integral; corrupted params"
            )
        out[c.target] = out.get(c.target, ()) + (int(e),)
    return out


def theoretical_threshold(inst: MaxAvgInstance, m: int) -> int:
    """Exponent W^(M*n) of the substitution bound 2^(2^(M*n*log2 W)).

    Any K > W^(M*n) makes 2^K exceed the bound; K = 2*D*W^(M*n) always
    does (asserted in :func:`compute_params` consumers).
    """
    if m < 1:
        raise RealizeError("M must be >= 1")
    consts = inst.constants()
    w = 2 + max((abs(c.numerator) + c.denominator for c in consts), default=0)
    return w ** (m * inst.source_var_count)
