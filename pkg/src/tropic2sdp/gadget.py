"""Spectrahedral gadget pinning a variable to an exact power of two.

A chain of 2x2 blocks computes x_k = 2^n by repeated squaring along the
signed binary digits of n; the primal blocks force x_k >= 2^n, a dual
certificate chain forces x_k <= 2^n, and their conjunction carves out the
singleton {2^n}.  All block coefficients come from {0, +-1/2, +-1, +-2},
so the gadget size is linear in the bit length of n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .dyadic import DyadicValue
from .sdpcore import (
    GADGET_DUAL,
    GADGET_PRIMAL,
    SDPInstance,
    SymBlock,
    equality_blocks,
)


def signed_bits(n: int) -> list[int]:
    """Digits of n in {-1, 0, 1}, most significant first.

    For n != 0 these are the plain binary digits of |n| times sign(n);
    the leading digit is always +-1.  n == 0 yields the empty list.
    """
    if n == 0:
        return []
    sign = 1 if n > 0 else -1
    return [sign * int(d) for d in bin(abs(n))[2:]]


def digit_exponents(n: int) -> list[int]:
    """Partial exponents e_l with e_0 = b_0, e_l = b_l + 2*e_(l-1); e_k = n."""
    exps: list[int] = []
    e = 0
    for b in signed_bits(n):
        e = b + 2 * e
        exps.append(e)
    assert not exps or exps[-1] == n
    return exps


@dataclass(frozen=True)
class Pow2Gadget:
    """Block system with a distinguished output variable equal to 2^n."""

    n: int
    prefix: str
    _system: SDPInstance
    output_var: str

    def block_system(self) -> SDPInstance:
        return self._system

    @property
    def k(self) -> int:
        return max(len(signed_bits(self.n)) - 1, 0)


def build_pow2_gadget(n: int, prefix: str = "g_") -> Pow2Gadget:
    bits = signed_bits(n)
    if not bits:
        # 2^0 = 1: a single variable pinned by an opposed equality pair.
        out = f"{prefix}x0"
        system = SDPInstance(
            {out: GADGET_PRIMAL},
            tuple(equality_blocks({out: Fraction(1)}, Fraction(1))),
        )
        return Pow2Gadget(0, prefix, system, out)

    k = len(bits) - 1
    x = [f"{prefix}x{i}" for i in range(k + 1)]
    y11 = [f"{prefix}y{i}_11" for i in range(k + 1)]
    y12 = [f"{prefix}y{i}_12" for i in range(k + 1)]
    y22 = [f"{prefix}y{i}_22" for i in range(k + 1)]

    variables: dict[str, str] = {v: GADGET_PRIMAL for v in x}
    for names in (y11, y12, y22):
        variables.update({v: GADGET_DUAL for v in names})

    blocks: list[SymBlock] = []
    # primal chain: block 0 forces x_0 >= 2^(b_0), block l forces
    # x_l >= x_(l-1)^2 * 2^(b_l)
    for l, b in enumerate(bits):
        coeffs = {x[l]: {(0, 0): Fraction(1)}}
        const = {(1, 1): -Fraction(2) ** (-b)}
        if l == 0:
            const[(0, 1)] = Fraction(-1)
        else:
            coeffs[x[l - 1]] = {(0, 1): Fraction(1)}
        blocks.append(SymBlock(2, coeffs, const))
    # dual matrices must themselves be PSD
    for l in range(k + 1):
        blocks.append(
            SymBlock(
                2,
                {
                    y11[l]: {(0, 0): Fraction(1)},
                    y12[l]: {(0, 1): Fraction(1)},
                    y22[l]: {(1, 1): Fraction(1)},
                },
            )
        )
    # dual equalities <A_l, Y> = c_l with c = (0, ..., 0, 1)
    for l in range(k):
        blocks.extend(equality_blocks({y11[l]: Fraction(1), y12[l + 1]: Fraction(2)}))
    blocks.extend(equality_blocks({y11[k]: Fraction(1)}, Fraction(1)))
    # linking: <B, Y> = x_k squeezes x_k between the primal lower bound
    # and the dual upper bound, both equal to 2^n
    link = {x[k]: Fraction(-1), y12[0]: Fraction(-2)}
    for l, b in enumerate(bits):
        link[y22[l]] = link.get(y22[l], Fraction(0)) - Fraction(2) ** (-b)
    blocks.extend(equality_blocks(link))

    system = SDPInstance(variables, tuple(blocks))
    return Pow2Gadget(n, prefix, system, x[k])


def primal_witness(gadget: Pow2Gadget) -> dict[str, DyadicValue]:
    """x_l = 2^(e_l) along the digit chain."""
    if gadget.n == 0:
        return {gadget.output_var: DyadicValue.pow2(0)}
    return {
        f"{gadget.prefix}x{l}": DyadicValue.pow2(e)
        for l, e in enumerate(digit_exponents(gadget.n))
    }


def dual_witness(gadget: Pow2Gadget) -> dict[str, DyadicValue]:
    """Closed-form certificate matrices, all rank one with power-of-two
    entries: Y_l = 2^(k-l+n-e_l) * v v^T with v = (1, -2^(e_l - e_(l-1)))."""
    if gadget.n == 0:
        return {}
    n = gadget.n
    bits = signed_bits(n)
    k = len(bits) - 1
    exps = digit_exponents(n)
    out: dict[str, DyadicValue] = {}
    prev = 0
    for l, e in enumerate(exps):
        alpha = k - l + n - e
        out[f"{gadget.prefix}y{l}_11"] = DyadicValue.pow2(alpha)
        out[f"{gadget.prefix}y{l}_12"] = -DyadicValue.pow2(k - l + n - prev)
        out[f"{gadget.prefix}y{l}_22"] = DyadicValue.pow2(k - l + n + bits[l])
        prev = e
    return out


def gadget_witness(gadget: Pow2Gadget) -> dict[str, DyadicValue]:
    """Full satisfying assignment for the gadget's block system."""
    w = primal_witness(gadget)
    w.update(dual_witness(gadget))
    return w
