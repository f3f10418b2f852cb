"""Command-line front end: pipeline orchestration, oracles, generators.

Exit codes: 0 success (1: negative check verdict), 2 malformed input,
3 contract violation (non-stopping game, bad override, cap exceeded),
4 internal invariant breach.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import bridge, games, gadget, generate, kernels, maxavg, nonarch, realize, sdpcore
from .dyadic import DyadicValue

log = logging.getLogger("tropic2sdp")

EXIT_OK = 0
EXIT_VERDICT_FAIL = 1
EXIT_INPUT = 2
EXIT_CONTRACT = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    pass


class ContractError(Exception):
    pass


@dataclass
class ReduceResult:
    instance: sdpcore.SDPInstance
    csp: maxavg.MaxAvgInstance
    params: realize.RealizationParams
    exponents: dict[int, int]
    gadgets: dict[int, gadget.Pow2Gadget]
    oracle: maxavg.OracleResult
    bridge_info: Optional[dict] = None


def _parse_input(fmt: str, text: str):
    try:
        if fmt == "parity":
            return games.parse_pgsolver(text)
        if fmt == "mpg":
            pg = games.parse_pgsolver(text)
            return games.parity_to_mpg(pg)
        if fmt == "ssg":
            return games.parse_ssg(text)
        if fmt == "maxavg":
            return maxavg.parse_maxavg(text)
    except (games.GameError, maxavg.MaxAvgError, ValueError) as e:
        raise InputError(str(e)) from e
    raise InputError(f"unknown input format {fmt!r}")


def run_reduce(
    fmt: str,
    text: str,
    target: int,
    m: int = 8,
    override_k: Optional[int] = None,
    cap: int = games.DEFAULT_CAP,
    oracle_budget: int = 10_000,
) -> ReduceResult:
    """Full pipeline: source -> constraint system -> lifted system -> SDP."""
    src = _parse_input(fmt, text)
    bridge_info = None
    try:
        if fmt in ("parity", "mpg"):
            mpg = games.parity_to_mpg(src) if fmt == "parity" else src
            br = bridge.mpg_to_ssg(mpg, target)
            bridge_info = {
                "query": br.query,
                "nodes": br.game.n,
                "discount_bits": br.discount_bits,
                "offset_bits": br.offset_bits,
            }
            # stopping holds by construction for bridged games, and their
            # node count routinely exceeds the enumeration cap
            inst = games.ssg_to_maxavg(br.game, br.query, stopping_cap=None)
        elif fmt == "ssg":
            inst = games.ssg_to_maxavg(src, target, stopping_cap=cap)
        else:
            inst = maxavg.normalize(src)
        oracle = maxavg.oracle_feasible(inst, budget=oracle_budget)
        params = realize.compute_params(inst, m, override_k=override_k)
        exponents = realize.integer_exponents(params, inst)
        distinct = sorted({e for es in exponents.values() for e in es})
        prefixes = {e: f"g{i}_" for i, e in enumerate(distinct)}
        gadgets = {e: gadget.build_pow2_gadget(e, p) for e, p in prefixes.items()}
        sdp = sdpcore.assemble(inst_to_system(inst), params, gadgets)
    except games.CapExceeded as e:
        raise ContractError(str(e)) from e
    except games.GameError as e:
        raise ContractError(str(e)) from e
    except realize.RealizeError as e:
        raise ContractError(str(e)) from e
    meta = dict(sdp.metadata)
    meta["source"] = {"format": fmt, "target": target}
    meta["oracle"] = oracle.status
    if bridge_info:
        meta["bridge"] = bridge_info
    sdp = sdpcore.SDPInstance(sdp.variables, sdp.blocks, meta)
    return ReduceResult(sdp, inst, params, exponents, gadgets, oracle, bridge_info)


def inst_to_system(inst: maxavg.MaxAvgInstance) -> nonarch.NonArchSystem:
    return nonarch.lift(inst)


def forward_witness(result: ReduceResult) -> Optional[dict[str, DyadicValue]]:
    """Satisfying SDP assignment built from a feasible oracle witness, or
    None when no witness exists or the exponents a_i*K are not integral."""
    if result.oracle.status != maxavg.FEASIBLE or result.oracle.witness is None:
        return None
    k = result.params.k
    w: dict[str, DyadicValue] = {}
    for i, a in enumerate(result.oracle.witness):
        if maxavg.is_neg_inf(a):
            w[f"x{i}"] = DyadicValue.zero()
            continue
        e = Fraction(a) * k
        if e.denominator != 1:
            return None
        w[f"x{i}"] = DyadicValue.pow2(int(e))
    for gd in result.gadgets.values():
        w.update(gadget.gadget_witness(gd))
    return w


def _write_out(path: Optional[str], data: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(data)
    else:
        with open(path, "w") as fh:
            fh.write(data)


def _cmd_reduce(args) -> int:
    with open(args.input) as fh:
        text = fh.read()
    result = run_reduce(
        args.from_, text, args.target, m=args.qe_constant,
        override_k=args.override_k, cap=args.cap,
    )
    if args.format == "sdpa":
        out = sdpcore.emit_sdpa(result.instance, diag_pack=not args.no_diag_pack)
    else:
        out = sdpcore.emit_json(result.instance)
    _write_out(args.out, out)
    if args.emit_witness:
        w = forward_witness(result)
        if w is None:
            raise ContractError(
                "no integral forward witness (instance infeasible/unknown, "
                "or override-K does not clear the witness denominators)"
            )
        _write_out(args.emit_witness, sdpcore.witness_to_json(w))
    report = {
        "variables": result.instance.n_vars,
        "blocks": len(result.instance.blocks),
        "oracle": result.oracle.status,
        "params": result.params.metadata(),
    }
    print(json.dumps(report, indent=1, default=str), file=sys.stderr)
    return EXIT_OK


def _cmd_solve(args) -> int:
    with open(args.input) as fh:
        text = fh.read()
    src = _parse_input(args.from_, text)
    try:
        if args.from_ == "parity":
            winners = games.zielonka_winners(src)
            report = {"winners": list(winners)}
        elif args.from_ == "mpg":
            gv = games.mpg_value_bruteforce(src, cap=args.cap)
            report = {"values": [str(v) for v in gv.values]}
        elif args.from_ == "ssg":
            gv = games.ssg_value_bruteforce(src, cap=args.cap)
            report = {"values": [str(v) for v in gv.values]}
        else:
            inst = maxavg.normalize(src)
            res = maxavg.oracle_feasible(inst, budget=args.budget)
            report = {"status": res.status, "detail": res.detail}
            if res.witness is not None:
                report["witness"] = [str(v) for v in res.witness]
    except games.CapExceeded as e:
        raise ContractError(str(e)) from e
    _write_out(args.out, json.dumps(report, indent=1) + "\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    with open(args.instance) as fh:
        try:
            inst = sdpcore.parse_instance_json(fh.read())
        except (sdpcore.SDPError, ValueError, KeyError) as e:
            raise InputError(f"bad instance file: {e}") from e
    with open(args.witness) as fh:
        try:
            witness = sdpcore.witness_from_json(fh.read())
        except (ValueError, KeyError) as e:
            raise InputError(f"bad witness file: {e}") from e
    try:
        failures = sdpcore.witness_report(inst, witness)
    except sdpcore.SDPError as e:
        raise ContractError(str(e)) from e
    if failures:
        print("FAIL")
        for _, reason in failures:
            print(f"  {reason}")
        return EXIT_VERDICT_FAIL
    print("PASS")
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.kind == "ssg":
        g = generate.gen_random_ssg(args.seed, args.size)
        out = games.serialize_ssg(g)
    elif args.kind == "chain":
        g = generate.gen_chain_ssg(args.size)
        out = games.serialize_ssg(g)
    else:
        inst = generate.gen_random_maxavg(args.seed, args.size)
        out = maxavg.serialize_maxavg(inst)
    _write_out(args.out, out)
    return EXIT_OK


def _bench_chain(n: int) -> tuple[int, float, int]:
    g = generate.gen_chain_ssg(n)
    text = games.serialize_ssg(g)
    t0 = time.perf_counter()
    result = run_reduce("ssg", text, 0, m=1, cap=10_000, oracle_budget=200)
    out = sdpcore.emit_sdpa(result.instance)
    return n, time.perf_counter() - t0, len(out.encode())


def _bench_kernels(trials: int, seed: int) -> dict:
    import random as _random

    from . import _psd_pure

    rng = _random.Random(seed)
    dim = 4
    mats = []
    for _ in range(trials):
        m = [[0] * dim for _ in range(dim)]
        for i in range(dim):
            for j in range(i, dim):
                m[i][j] = m[j][i] = rng.randint(-2, 2)
        mats.append([v for row in m for v in row])
    t0 = time.perf_counter()
    r_pure = _psd_pure.psd_int_many(mats, dim)
    t_pure = time.perf_counter() - t0
    t0 = time.perf_counter()
    r_active = kernels.psd_int_many(mats, dim)
    t_active = time.perf_counter() - t0
    if r_pure != r_active:
        raise AssertionError("kernel implementations disagree")
    return {
        "active_impl": kernels.ACTIVE_IMPL,
        "trials": trials,
        "pure_seconds": round(t_pure, 4),
        "active_seconds": round(t_active, 4),
        "speedup": round(t_pure / t_active, 2) if t_active > 0 else None,
    }


def _cmd_bench(args) -> int:
    from concurrent.futures import ProcessPoolExecutor

    report = {"kernels": _bench_kernels(args.trials, args.seed)}
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else []
    if sizes:
        rows = []
        with ProcessPoolExecutor() as pool:
            for n, secs, nbytes in pool.map(_bench_chain, sizes):
                rows.append({"n": n, "seconds": round(secs, 4), "sdpa_bytes": nbytes})
        report["pipeline"] = rows
    _write_out(args.out, json.dumps(report, indent=1) + "\n")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tropic2sdp")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    r = sub.add_parser("reduce", help="compile a game or constraint system to an SDP")
    r.add_argument("input")
    r.add_argument("--from", dest="from_", required=True,
                   choices=["parity", "mpg", "ssg", "maxavg"])
    r.add_argument("--target", type=int, default=0,
                   help="query node (games) for the value >= 1/2 threshold")
    r.add_argument("--qe-constant", type=int, default=8, metavar="M",
                   help="quantifier-elimination constant M (default 8)")
    r.add_argument("--override-K", dest="override_k", type=int, default=None,
                   help="override the realization exponent scale K")
    r.add_argument("--format", choices=["sdpa", "json"], default="sdpa")
    r.add_argument("--cap", type=int, default=games.DEFAULT_CAP)
    r.add_argument("--no-diag-pack", action="store_true",
                   help="keep 1x1 blocks separate instead of one diagonal block")
    r.add_argument("--emit-witness", default=None, metavar="PATH",
                   help="also write a satisfying assignment when one is known")
    add_common(r)

    s = sub.add_parser("solve", help="run the exact oracles on an input")
    s.add_argument("input")
    s.add_argument("--from", dest="from_", required=True,
                   choices=["parity", "mpg", "ssg", "maxavg"])
    s.add_argument("--cap", type=int, default=games.DEFAULT_CAP)
    s.add_argument("--budget", type=int, default=10_000)
    add_common(s)

    c = sub.add_parser("check", help="verify a witness against an instance (json)")
    c.add_argument("instance")
    c.add_argument("--witness", required=True)

    g = sub.add_parser("gen", help="generate a seeded random instance")
    g.add_argument("--kind", choices=["ssg", "maxavg", "chain"], default="ssg")
    g.add_argument("--size", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    add_common(g)

    b = sub.add_parser("bench", help="benchmark kernels and the pipeline")
    b.add_argument("--trials", type=int, default=200_000)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--sizes", default="", help="comma-separated chain lengths")
    add_common(b)
    return p


_DISPATCH = {
    "reduce": _cmd_reduce,
    "solve": _cmd_solve,
    "check": _cmd_check,
    "gen": _cmd_gen,
    "bench": _cmd_bench,
}


def main(argv: Optional[list[str]] = None) -> int:
    level = os.environ.get("TROPIC2SDP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = _build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ContractError as e:
        print(f"contract violation: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except (sdpcore.SDPError, AssertionError) as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
