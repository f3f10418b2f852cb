"""Exact values of the form sign * mantissa * 2^exponent.

Witness entries of the emitted SDPs are powers of two with arbitrary-
precision integer exponents; plain rationals would need 2^|exponent| bits.
Multiplication, division and comparison are always exact here.  Addition
aligns mantissas and is exact as long as the exponent gap stays within a
configurable cap; blocks built by the pipeline only ever add values of
nearby scale, so a cap breach indicates a misuse and raises.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

# Max exponent gap (in bits) addition will materialize.
DEFAULT_ALIGN_CAP = 1 << 22


class ExponentGapError(ArithmeticError):
    """Addition of values whose scales are too far apart to materialize."""


def _normalize(frac: Fraction) -> tuple[Fraction, int]:
    """Write a positive rational as mantissa * 2^e with mantissa in [1, 2)."""
    num, den = frac.numerator, frac.denominator
    e = num.bit_length() - den.bit_length()
    m = frac / Fraction(2) ** e
    if m >= 2:
        m /= 2
        e += 1
    elif m < 1:
        m *= 2
        e -= 1
    assert 1 <= m < 2
    return m, e


@dataclass(frozen=True)
class DyadicValue:
    sign: int  # -1, 0, +1
    mantissa: Fraction  # in [1, 2) unless zero
    exp: int

    align_cap: int = field(default=DEFAULT_ALIGN_CAP, compare=False, repr=False)

    def __post_init__(self):
        if self.sign == 0:
            if self.mantissa != 0 or self.exp != 0:
                raise ValueError("zero must be canonical")
        elif not (1 <= self.mantissa < 2):
            raise ValueError("mantissa must lie in [1, 2)")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero() -> "DyadicValue":
        return DyadicValue(0, Fraction(0), 0)

    @staticmethod
    def from_fraction(f: Fraction | int) -> "DyadicValue":
        f = Fraction(f)
        if f == 0:
            return DyadicValue.zero()
        m, e = _normalize(abs(f))
        return DyadicValue(1 if f > 0 else -1, m, e)

    @staticmethod
    def pow2(e: int) -> "DyadicValue":
        return DyadicValue(1, Fraction(1), e)

    # -- queries -----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_fraction(self, cap: int | None = None) -> Fraction:
        cap = self.align_cap if cap is None else cap
        if self.is_zero:
            return Fraction(0)
        if abs(self.exp) > cap:
            raise ExponentGapError(f"|exponent| {self.exp} exceeds cap {cap}")
        return self.sign * self.mantissa * Fraction(2) ** self.exp

    # -- arithmetic --------------------------------------------------------

    def __neg__(self) -> "DyadicValue":
        if self.is_zero:
            return self
        return DyadicValue(-self.sign, self.mantissa, self.exp)

    def __add__(self, other: "DyadicValue") -> "DyadicValue":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        gap = abs(self.exp - other.exp)
        if gap > self.align_cap:
            raise ExponentGapError(
                f"exponent gap {gap} exceeds alignment cap {self.align_cap}"
            )
        e = min(self.exp, other.exp)
        total = self.sign * self.mantissa * Fraction(2) ** (self.exp - e) + (
            other.sign * other.mantissa * Fraction(2) ** (other.exp - e)
        )
        if total == 0:
            return DyadicValue.zero()
        m, e2 = _normalize(abs(total))
        return DyadicValue(1 if total > 0 else -1, m, e2 + e)

    def __sub__(self, other: "DyadicValue") -> "DyadicValue":
        return self + (-other)

    def __mul__(self, other: "DyadicValue") -> "DyadicValue":
        if self.is_zero or other.is_zero:
            return DyadicValue.zero()
        m = self.mantissa * other.mantissa
        e = self.exp + other.exp
        if m >= 2:
            m /= 2
            e += 1
        return DyadicValue(self.sign * other.sign, m, e)

    def __truediv__(self, other: "DyadicValue") -> "DyadicValue":
        if other.is_zero:
            raise ZeroDivisionError("division by zero dyadic value")
        if self.is_zero:
            return self
        m = self.mantissa / other.mantissa
        e = self.exp - other.exp
        if m < 1:
            m *= 2
            e -= 1
        return DyadicValue(self.sign * other.sign, m, e)

    # -- exact order -------------------------------------------------------

    def _cmp(self, other: "DyadicValue") -> int:
        if self.sign != other.sign:
            return -1 if self.sign < other.sign else 1
        if self.sign == 0:
            return 0
        # same nonzero sign: exponent dominance, mantissas break ties
        if self.exp != other.exp:
            mag = -1 if self.exp < other.exp else 1
        elif self.mantissa != other.mantissa:
            mag = -1 if self.mantissa < other.mantissa else 1
        else:
            mag = 0
        return mag * self.sign

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __repr__(self) -> str:
        if self.is_zero:
            return "Dyadic(0)"
        s = "-" if self.sign < 0 else ""
        if self.mantissa == 1:
            return f"Dyadic({s}2^{self.exp})"
        return f"Dyadic({s}{self.mantissa}*2^{self.exp})"
