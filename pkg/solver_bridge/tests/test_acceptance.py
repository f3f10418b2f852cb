"""Acceptance checks for the numeric cross-check harness.

Two claims are verified end to end against the tropic2sdp producer:

1. On a 50-instance control corpus of game-derived reductions, the solver
   verdict agrees with the exact oracle verdict at every K at or above the
   empirical stabilization point, and agreement at K=24 is 100% at
   tolerance 1e-7.
2. The power-of-two gadget really pins its output: min and max of x0 over
   the gadget spectrahedron equal 2^n to within 1e-6 relative error for
   every |n| <= 20.
"""

import subprocess

import pytest

from solver_bridge.corpus import DEFAULT_KS, build_corpus
from solver_bridge.crosscheck import cross_check, to_markdown
from solver_bridge.pin import pin_bounds

from conftest import run_producer

TOL = 1e-7


@pytest.fixture(scope="module")
def corpus_result(tmp_path_factory, producer_available):
    dest = tmp_path_factory.mktemp("corpus")
    written = build_corpus(dest, count=50, ks=DEFAULT_KS)
    assert len(written) == 50 * len(DEFAULT_KS)
    return cross_check(dest, TOL)


def test_corpus_agreement(corpus_result):
    result = corpus_result
    assert set(result.by_k) == set(DEFAULT_KS)
    for k in DEFAULT_KS:
        agree, total = result.by_k[k]
        assert total == 50

    # stabilization point: smallest K from which agreement stays perfect
    stable = [k for k in DEFAULT_KS if all(
        result.fully_agrees_at(k2) for k2 in DEFAULT_KS if k2 >= k
    )]
    assert stable, "no K reaches full agreement:\n" + to_markdown(result)
    assert result.fully_agrees_at(24), (
        "agreement at K=24 below 100%:\n" + to_markdown(result)
    )
    print(
        f"\nPASS corpus cross-check: 150 instances, 100% agreement at K=24 "
        f"(tol {TOL:g}), stabilization at K={stable[0]}, per-K "
        + str({k: f"{result.agreement(k):.0%}" for k in DEFAULT_KS})
    )


def test_gadget_pinning(tmp_path, producer_available):
    worst = 0.0
    for n in range(-20, 21):
        src = tmp_path / f"pin{n}.ma"
        src.write_text(f"maxavg 1\nCONST 0 {n}\n")
        out = tmp_path / f"pin{n}.json"
        run_producer(
            "reduce", str(src), "--from", "maxavg", "--override-K", "1",
            "--format", "json", "--out", str(out),
        )
        lo, hi = pin_bounds(out.read_text(), "x0")
        target = 2.0 ** n
        err = max(abs(lo - target), abs(hi - target)) / target
        worst = max(worst, err)
        assert err <= 1e-6, f"n={n}: min={lo} max={hi} target={target} rel err {err:.3e}"
    print(f"\nPASS gadget pinning: 2^n recovered for |n| <= 20, worst rel err {worst:.3e}")
