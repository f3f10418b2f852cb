"""Command line front end for the numeric cross-check harness."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .corpus import DEFAULT_KS, CorpusError, build_corpus
from .crosscheck import cross_check, to_csv, to_markdown
from .pin import PinError, pin_bounds
from .sdpa import SDPAParseError
from .solve import solve_sdpa


def _cmd_solve(args) -> int:
    rep = solve_sdpa(args.input, args.tolerance)
    print(json.dumps(rep.row(), indent=1, default=str))
    return 0


def _cmd_cross_check(args) -> int:
    result = cross_check(args.corpus, args.tolerance)
    text = to_csv(result) if args.format == "csv" else to_markdown(result)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if result.empty:
        return 0
    gate = args.gate_k if args.gate_k is not None else max(result.by_k)
    # the control corpus must agree perfectly at the gating K
    return 0 if result.fully_agrees_at(gate) else 1


def _cmd_make_corpus(args) -> int:
    ks = tuple(int(t) for t in args.ks.split(","))
    written = build_corpus(args.dest, count=args.count, ks=ks, cli=args.producer)
    print(f"wrote {len(written)} instances to {args.dest}")
    return 0


def _cmd_pin(args) -> int:
    with open(args.input) as fh:
        lo, hi = pin_bounds(fh.read(), args.var)
    print(json.dumps({"var": args.var, "min": lo, "max": hi}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="solver-bridge")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one .dat-s instance and report the verdict")
    s.add_argument("input")
    s.add_argument("--tolerance", type=float, default=1e-7)

    c = sub.add_parser("cross-check", help="cross-check a corpus directory")
    c.add_argument("corpus")
    c.add_argument("--tolerance", type=float, default=1e-7)
    c.add_argument("--format", choices=["csv", "markdown"], default="markdown")
    c.add_argument("--gate-k", type=int, default=None,
                   help="K whose agreement must be 100%% (default: largest in corpus)")
    c.add_argument("--out", default=None)

    m = sub.add_parser("make-corpus", help="generate a control corpus via tropic2sdp")
    m.add_argument("dest")
    m.add_argument("--count", type=int, default=50)
    m.add_argument("--ks", default=",".join(str(k) for k in DEFAULT_KS))
    m.add_argument("--producer", default="tropic2sdp",
                   help="path to the tropic2sdp executable")

    g = sub.add_parser("pin", help="min/max of one variable over a JSON instance")
    g.add_argument("input")
    g.add_argument("--var", required=True)
    return p


def main(argv: Optional[list[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    dispatch = {
        "solve": _cmd_solve,
        "cross-check": _cmd_cross_check,
        "make-corpus": _cmd_make_corpus,
        "pin": _cmd_pin,
    }
    try:
        return dispatch[args.command](args)
    except (SDPAParseError, PinError, CorpusError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
