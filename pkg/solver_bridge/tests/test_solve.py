import dataclasses
import math

import pytest

from solver_bridge.sdpa import SDPAProblem, parse_sdpa
from solver_bridge.solve import (
    FEASIBLE,
    INCONCLUSIVE,
    INFEASIBLE,
    INFEASIBLE_FACTOR,
    classify,
    solve_problem,
    solve_sdpa,
)

from conftest import reduce_text

COIN = "maxavg 3\nLEAVG 0 1 2\nCONST 1 1\nCONST 2 0\nGECONST 0 1/2\n"
CONTRADICTION = "maxavg 1\nCONST 0 0\nCONST 0 1\n"
GADGET_ONE = "maxavg 1\nCONST 0 1\n"

TOL = 1e-7


def test_classify_thresholds():
    assert classify(0.0, TOL) == FEASIBLE
    assert classify(TOL, TOL) == FEASIBLE
    assert classify(INFEASIBLE_FACTOR * TOL, TOL) == INFEASIBLE
    assert classify(1.0, TOL) == INFEASIBLE
    assert classify(10 * TOL, TOL) == INCONCLUSIVE


def test_coin_flip_feasible(tmp_path, producer_available):
    text = reduce_text(tmp_path, "coin_K8.dat-s", COIN, "--override-K", "8")
    rep = solve_problem(parse_sdpa(text), TOL)
    assert rep.verdict == FEASIBLE
    assert rep.residual <= TOL
    assert rep.oracle == FEASIBLE
    assert rep.agrees is True
    assert rep.solver is not None


def test_contradiction_infeasible(tmp_path, producer_available):
    # x0 = 2^0 and x0 = 2^1 cannot hold at once, at any K
    for k in (1, 8):
        text = reduce_text(
            tmp_path, f"contra_K{k}.dat-s", CONTRADICTION, "--override-K", str(k)
        )
        rep = solve_problem(parse_sdpa(text), TOL)
        assert rep.verdict == INFEASIBLE
        assert rep.oracle == INFEASIBLE
        assert rep.agrees is True


def test_gadget_pinning_blocks_extra_constraint(tmp_path, producer_available):
    # gadget(1) pins x0 = 2; appending the 1x1 block [x0 - 3] breaks it
    text = reduce_text(tmp_path, "gadget1_K1.dat-s", GADGET_ONE, "--override-K", "1")
    prob = parse_sdpa(text)
    rep = solve_problem(prob, TOL)
    assert rep.verdict == FEASIBLE

    nb = prob.n_blocks + 1
    pinned = dataclasses.replace(
        prob,
        block_sizes=prob.block_sizes + (1,),
        entries=prob.entries + ((0, nb, 1, 1, 3.0), (1, nb, 1, 1, 1.0)),
    )
    rep = solve_problem(pinned, TOL)
    assert rep.verdict == INFEASIBLE
    # the margin needed is (3 - 2) spread over the new block
    assert rep.residual > 0.1


def test_empty_problem_feasible():
    prob = SDPAProblem(0, (), (), {})
    rep = solve_problem(prob, TOL)
    assert rep.verdict == FEASIBLE
    assert rep.residual == 0.0
    assert rep.agrees is None  # no oracle verdict to compare against


def test_solve_sdpa_reads_file(tmp_path, producer_available):
    text = reduce_text(tmp_path, "coin_K8.dat-s", COIN, "--override-K", "8")
    path = tmp_path / "coin_K8.dat-s"
    rep = solve_sdpa(str(path), TOL)
    assert rep.instance == str(path)
    assert rep.verdict == FEASIBLE
    assert rep.k_bits is not None
    assert not math.isnan(rep.wall_time)
    row = rep.row()
    assert row["agrees"] is True
    assert row["K_bits"] == rep.k_bits
