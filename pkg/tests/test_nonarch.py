import random
from fractions import Fraction as F

import pytest

from tropic2sdp.generate import gen_random_maxavg
from tropic2sdp.maxavg import (
    NEG_INF,
    AvgLe,
    Const,
    MaxAvgInstance,
    MaxLe,
    check_assignment,
    normalize,
)
from tropic2sdp.nonarch import (
    Monomial,
    PowerEq,
    SquareLe,
    SumGe,
    lift,
    monomial_witness,
    valuations,
    verify_nonarch,
)


def inst(n, *cs):
    return MaxAvgInstance(n, tuple(cs))


def mono(coeff, exp):
    return Monomial(F(coeff), F(exp))


# --- lift ---


def test_lift_shapes():
    sys = lift(inst(3, MaxLe(0, (1, 2)), AvgLe(0, 1, 2), Const(0, F(1, 2))))
    assert sys.constraints == (
        SumGe(0, (1, 2)),
        SquareLe(0, 1, 2),
        PowerEq(0, F(1, 2)),
    )
    assert sys.provenance == (0, 1, 2)


def test_lift_requires_normalized():
    from tropic2sdp.maxavg import GeConst

    with pytest.raises(ValueError):
        lift(inst(1, GeConst(0, F(1))))


def test_lift_neg_inf_constant():
    sys = lift(inst(1, Const(0, NEG_INF)))
    assert sys.constraints == (SumGe(0, ()),)


# --- monomial witness ---


def test_monomial_witness_images():
    w = monomial_witness((F(1, 2), NEG_INF, F(0)))
    assert w[0] == mono(1, F(1, 2))
    assert w[1].is_zero
    assert w[2] == mono(1, 0)


def test_valuation_laws():
    # val(x*y) = val(x) + val(y); val(x+y) <= max of valuations
    rng = random.Random(1)
    for _ in range(200):
        x = mono(rng.randint(0, 5), F(rng.randint(-4, 4), rng.randint(1, 4)))
        y = mono(rng.randint(1, 5), F(rng.randint(-4, 4), rng.randint(1, 4)))
        prod = Monomial(x.coeff * y.coeff, x.exp + y.exp)
        if x.is_zero or y.is_zero:
            assert prod.coeff == 0
        else:
            assert prod.val() == x.val() + y.val()
        both = max(
            v for v in (x.val(), y.val()) if v != NEG_INF
        ) if not (x.is_zero and y.is_zero) else NEG_INF
        # the sum of nonnegative monomials never gains valuation
        if not x.is_zero or not y.is_zero:
            assert max(x.val(), y.val()) <= both


# --- verify ---


def test_verify_sum_tie_coefficients():
    sys = lift(inst(3, MaxLe(0, (1, 2))))
    assert verify_nonarch(sys, (mono(1, 1), mono(1, 1), mono(1, 1)))


def test_verify_square_valuation_arithmetic():
    sys = lift(inst(3, AvgLe(0, 1, 2)))
    assert verify_nonarch(sys, (mono(1, F(1, 2)), mono(1, 0), mono(1, 1)))


def test_verify_power_requires_unit_coefficient():
    sys = lift(inst(1, Const(0, F(1, 2))))
    assert not verify_nonarch(sys, (mono(2, F(1, 2)),))
    assert verify_nonarch(sys, (mono(1, F(1, 2)),))


def test_verify_sum_strict_beats_tie():
    sys = lift(inst(2, MaxLe(0, (1,))))
    assert verify_nonarch(sys, (mono(3, 0), mono(1, 1)))  # val 0 < 1
    assert not verify_nonarch(sys, (mono(3, 1), mono(1, 0)))


# --- both directions at monomial level ---


def rand_assignment(rng, n):
    out = []
    for _ in range(n):
        if rng.random() < 0.15:
            out.append(NEG_INF)
        else:
            out.append(F(rng.randint(-8, 8), rng.randint(1, 4)))
    return tuple(out)


def test_forward_soundness_random():
    from tropic2sdp.maxavg import FEASIBLE, oracle_feasible

    rng = random.Random(9)
    hits = 0
    for seed in range(300):
        i = normalize(gen_random_maxavg(seed, 4))
        candidates = [rand_assignment(rng, i.n)]
        res = oracle_feasible(i, budget=500)
        if res.status == FEASIBLE:
            candidates.append(tuple(res.witness))
        for a in candidates:
            if check_assignment(i, a):
                hits += 1
                assert verify_nonarch(lift(i), monomial_witness(a)), (seed, a)
    assert hits > 30  # the property must actually have been exercised


def test_valuation_extraction_random():
    from tropic2sdp.maxavg import FEASIBLE, oracle_feasible

    rng = random.Random(10)
    hits = 0
    for seed in range(300):
        i = normalize(gen_random_maxavg(seed, 4))
        sys = lift(i)
        candidates = [
            tuple(
                Monomial.zero()
                if rng.random() < 0.1
                else mono(rng.randint(1, 3), F(rng.randint(-6, 6), rng.randint(1, 3)))
                for _ in range(i.n)
            )
        ]
        res = oracle_feasible(i, budget=500)
        if res.status == FEASIBLE:
            # unit-coefficient monomials over a known-good valuation vector
            candidates.append(monomial_witness(res.witness))
        for w in candidates:
            if verify_nonarch(sys, w):
                hits += 1
                assert check_assignment(i, valuations(w)), (seed, w)
    assert hits > 30
