import random
from fractions import Fraction as F

import pytest

from tropic2sdp.dyadic import DyadicValue
from tropic2sdp.gadget import (
    build_pow2_gadget,
    digit_exponents,
    dual_witness,
    gadget_witness,
    primal_witness,
    signed_bits,
)
from tropic2sdp.sdpcore import check_witness, frobenius, psd_exact, witness_report


def test_signed_bits_examples():
    assert signed_bits(5) == [1, 0, 1]
    assert signed_bits(-1) == [-1]
    assert signed_bits(6) == [1, 1, 0]
    assert signed_bits(-6) == [-1, -1, 0]
    assert signed_bits(0) == []


def test_digit_exponents_reach_n():
    for n in list(range(-40, 41)) + [12345, -99999]:
        exps = digit_exponents(n)
        if n == 0:
            assert exps == []
        else:
            assert exps[-1] == n


def test_gadget_zero_is_unit_constraint():
    g = build_pow2_gadget(0)
    assert len(g.block_system().blocks) == 2
    assert check_witness(g.block_system(), {g.output_var: DyadicValue.pow2(0)})
    assert not check_witness(g.block_system(), {g.output_var: DyadicValue.pow2(1)})


def test_gadget_block_constants_n5():
    # bits (1,0,1): diagonal constants 2^-b are (1/2, 1, 1/2)
    g = build_pow2_gadget(5)
    consts = [
        -blk.const[(1, 1)]
        for blk in g.block_system().blocks[:3]
    ]
    assert consts == [F(1, 2), F(1), F(1, 2)]


def test_primal_witness_examples():
    assert [v.to_fraction() for v in primal_witness(build_pow2_gadget(5)).values()] == [
        F(2),
        F(4),
        F(32),
    ]
    assert list(primal_witness(build_pow2_gadget(-1)).values())[0].to_fraction() == F(1, 2)
    assert list(primal_witness(build_pow2_gadget(1)).values())[0].to_fraction() == F(2)


def test_full_witness_families():
    for n in list(range(-16, 17)) + [255, -256, 1023]:
        g = build_pow2_gadget(n)
        assert check_witness(g.block_system(), gadget_witness(g)), n


def test_dual_top_block_normalized():
    for n in (1, 2, 5, -7, 100):
        g = build_pow2_gadget(n)
        w = dual_witness(g)
        k = g.k
        assert w[f"{g.prefix}y{k}_11"].to_fraction() == 1


def link_pairing(n):
    """<B, Y> computed directly from the dual witness matrices."""
    g = build_pow2_gadget(n)
    bits = signed_bits(n)
    w = dual_witness(g)
    total = F(0)
    for ell, b in enumerate(bits):
        y12 = w[f"{g.prefix}y{ell}_12"].to_fraction()
        y22 = w[f"{g.prefix}y{ell}_22"].to_fraction()
        if ell == 0:
            total += 2 * (-1) * y12
        total += (-F(2) ** (-b)) * y22
    return total


def test_link_pairing_equals_power():
    for n in (1, 2, 5, -5, 9, -12):
        assert link_pairing(n) == F(2) ** n, n


def test_dual_solved_independently_small_k():
    # rebuild the dual certificate from scratch at small k: complementary
    # slackness against the primal optimum plus the equality chain pin Y
    # uniquely; compare with the closed form used by dual_witness
    sympy = pytest.importorskip("sympy")
    for n in (1, 2, 3, 5, -3, -6, 11):
        bits = signed_bits(n)
        k = len(bits) - 1
        exps = digit_exponents(n)
        xs = [sympy.Rational(2) ** e for e in exps]
        unknowns = []
        y = []
        for ell in range(k + 1):
            a, b, c = sympy.symbols(f"a{ell} b{ell} c{ell}")
            unknowns += [a, b, c]
            y.append(sympy.Matrix([[a, b], [b, c]]))
        eqs = []
        # primal block values at the witness (all singular at optimality)
        for ell in range(k + 1):
            low = xs[ell - 1] if ell else 1
            p = sympy.Matrix(
                [[xs[ell], low], [low, sympy.Rational(2) ** (-bits[ell])]]
            )
            prod = y[ell] * p
            eqs += [prod[0, 0], prod[0, 1], prod[1, 0], prod[1, 1]]
        # <A_l, Y> = c_l with c = (0,...,0,1)
        for ell in range(k):
            eqs.append(y[ell][0, 0] + 2 * y[ell + 1][0, 1])
        eqs.append(y[k][0, 0] - 1)
        sol = sympy.solve(eqs, unknowns, dict=True)
        assert len(sol) == 1
        g = build_pow2_gadget(n)
        w = dual_witness(g)
        for ell in range(k + 1):
            got11 = w[f"{g.prefix}y{ell}_11"].to_fraction()
            got12 = w[f"{g.prefix}y{ell}_12"].to_fraction()
            got22 = w[f"{g.prefix}y{ell}_22"].to_fraction()
            s = sol[0]
            assert (
                sympy.Rational(got11.numerator, got11.denominator)
                == s[unknowns[3 * ell]]
            )
            assert (
                sympy.Rational(got12.numerator, got12.denominator)
                == s[unknowns[3 * ell + 1]]
            )
            assert (
                sympy.Rational(got22.numerator, got22.denominator)
                == s[unknowns[3 * ell + 2]]
            )
        # and the recovered Y certifies the right bound
        assert link_pairing(n) == sympy.Rational(2) ** n


def test_primal_perturbation_fails():
    for n in (5, -5, 19, 33):
        g = build_pow2_gadget(n)
        base = gadget_witness(g)
        for ell in range(g.k + 1):
            for delta in (1, -1):
                w = dict(base)
                name = f"{g.prefix}x{ell}"
                w[name] = w[name] * DyadicValue.pow2(delta)
                assert not check_witness(g.block_system(), w), (n, ell, delta)


def test_strict_feasibility_scaling():
    # inflating x_l by 2^(3^(l+1)) makes every primal block positive
    # definite: the scale exponent must strictly outgrow doubling, since
    # the determinant of block l compares scale_l against scale_(l-1)^2
    for n in (1, 5, -6):
        g = build_pow2_gadget(n)
        bits = signed_bits(n)
        k = g.k
        xs = {
            ell: F(2) ** e * F(2) ** (3 ** (ell + 1))
            for ell, e in enumerate(digit_exponents(n))
        }
        for ell in range(k + 1):
            low = xs[ell - 1] if ell else F(1)
            mat = [[xs[ell], low], [low, F(2) ** (-bits[ell])]]
            assert psd_exact(mat)
            det = mat[0][0] * mat[1][1] - low * low
            assert det > 0 and mat[0][0] > 0


def test_weak_duality_identity_random_small_k():
    # for random PSD dual samples Y, <B,Y> <= sum_l x_l <A_l, Y> at the
    # primal witness (weak duality inequality, checked exactly)
    rng = random.Random(7)
    for n in (2, 5, -3):
        g = build_pow2_gadget(n)
        bits = signed_bits(n)
        k = g.k
        xs = [F(2) ** e for e in digit_exponents(n)]
        for _ in range(50):
            ys = []
            for _ell in range(k + 1):
                # random rank-one PSD block u u^T
                u = (F(rng.randint(-3, 3)), F(rng.randint(-3, 3)))
                ys.append(
                    [[u[0] * u[0], u[0] * u[1]], [u[0] * u[1], u[1] * u[1]]]
                )
            lhs = F(0)
            rhs = F(0)
            for ell in range(k + 1):
                b_blk = [
                    [F(0), -F(1) if ell == 0 else F(0)],
                    [-F(1) if ell == 0 else F(0), -(F(2) ** (-bits[ell]))],
                ]
                lhs += frobenius(b_blk, ys[ell])
                a_self = [[F(1), F(0)], [F(0), F(0)]]
                rhs += xs[ell] * frobenius(a_self, ys[ell])
                if ell + 1 <= k:
                    a_off = [[F(0), F(1)], [F(1), F(0)]]
                    rhs += xs[ell] * frobenius(a_off, ys[ell + 1])
            assert lhs <= rhs, n


def test_gadget_size_linear():
    for n in (5, 100, 2**20 + 7):
        g = build_pow2_gadget(n)
        k = g.k
        entries = sum(b.entry_count() for b in g.block_system().blocks)
        assert len(g.block_system().blocks) <= 8 * (k + 1) + 4
        assert entries <= 20 * (k + 1) + 10
