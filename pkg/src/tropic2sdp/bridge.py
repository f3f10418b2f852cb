"""Threshold reduction from mean payoff games to simple stochastic games.

The sign of a mean payoff value is decided through a discounted proxy: each
edge is replaced by a coin chain that restarts the edge's payoff lottery
with a tiny probability, so the reachability value of the built game equals
the discounted value of the source game.  The discount and the comparison
offset are chosen so that, for integer weights, value >= 1/2 at the query
node holds exactly when the mean payoff at the source node is >= 0.

All probabilities are dyadic, realized by fair-coin chains, and every
auxiliary node is a random node, so policy enumeration on the output stays
as cheap as on the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .games import (
    AVG,
    GameError,
    LOSE,
    SimpleStochasticGame,
    StochasticMeanPayoffGame,
    WIN,
)


@dataclass(frozen=True)
class BridgeResult:
    game: SimpleStochasticGame
    query: int  # value(query) >= 1/2  iff  mean payoff at source query >= 0
    discount_bits: int
    offset_bits: int
    weight_scale: int


class _Builder:
    def __init__(self):
        self.kinds: list[str] = []
        self.succs: list[list[int]] = []
        self.labels: list[str] = []

    def add(self, kind: str, label: str = "") -> int:
        self.kinds.append(kind)
        self.succs.append([])
        self.labels.append(label)
        return len(self.kinds) - 1

    def lottery(self, num: int, bits: int, win: int, lose: int, tag: str) -> int:
        """Entry node of a coin chain reaching Win with probability num/2^bits."""
        if num == 0:
            return lose
        if num == 1 << bits:
            return win
        digits = [(num >> (bits - 1 - i)) & 1 for i in range(bits)]
        while digits and digits[-1] == 0:
            digits.pop()
        entry = None
        prev = None
        for i, d in enumerate(digits):
            node = self.add(AVG, f"{tag}l{i}")
            # first branch decides this digit, second defers to the next;
            # the residual tail past the last (set) digit contributes zero
            self.succs[node] = [win if d else lose, lose]
            if prev is not None:
                self.succs[prev][1] = node
            else:
                entry = node
            prev = node
        return entry

    def coin_chain(self, rare: int, common: int, bits: int, tag: str) -> int:
        """Entry reaching ``rare`` with probability 2^-bits, else ``common``."""
        nxt = rare
        for i in reversed(range(bits)):
            node = self.add(AVG, f"{tag}c{i}")
            self.succs[node] = [nxt, common]
            nxt = node
        return nxt


def _integer_weights(g: StochasticMeanPayoffGame) -> tuple[list[list[int]], int]:
    scale = 1
    for row in g.weights:
        for w in row:
            scale = math.lcm(scale, Fraction(w).denominator)
    return [[int(Fraction(w) * scale) for w in row] for row in g.weights], scale


def mpg_to_ssg(g: StochasticMeanPayoffGame, query: int) -> BridgeResult:
    """Build a stopping SSG whose query-node value compares the mean payoff
    at ``query`` against zero.

    Requires a deterministic game.  Rational weights are scaled to integers
    first; scaling preserves the sign of every mean payoff value.
    """
    if not g.is_deterministic:
        raise GameError("bridge requires a deterministic mean payoff game")
    if not 0 <= query < g.n:
        raise GameError(f"query node {query} out of range")
    weights, scale = _integer_weights(g)
    n = g.n
    wmax = max((abs(w) for row in weights for w in row), default=0)
    wtil = 1 << max(wmax - 1, 0).bit_length()  # least power of two >= max(wmax, 1)
    j_bits = wtil.bit_length()  # 2*wtil == 2^j_bits
    b_bits = (16 * wtil * n**3 - 1).bit_length() + 1  # 2^-b < 1/(16*wtil*n^3)
    g_bits = (4 * wtil * n**2 - 1).bit_length()  # offset 2^-g <= 1/(4*wtil*n^2)

    bld = _Builder()
    base = [bld.add(g.kinds[u], g.labels[u] if u < len(g.labels) else "") for u in range(n)]
    win = bld.add(WIN, "win")
    lose = bld.add(LOSE, "lose")
    bld.succs[win] = [win]
    bld.succs[lose] = [lose]

    for u in range(n):
        for v, w in zip(g.successors[u], weights[u]):
            # normalized payoff (w + wtil) / (2*wtil) in [0, 1]
            num = w + wtil
            tag = f"e{u}_{v}_"
            pay = bld.lottery(num, j_bits, win, lose, tag)
            entry = bld.coin_chain(pay, base[v], b_bits, tag)
            bld.succs[base[u]].append(entry)

    # query gate: average the game start against a fixed 1/2 + 2^-g lottery
    offset_num = (1 << (g_bits - 1)) + 1
    ref = bld.lottery(offset_num, g_bits, win, lose, "ref_")
    s = bld.add(AVG, "query")
    bld.succs[s] = [base[query], ref]

    game = SimpleStochasticGame(
        tuple(bld.kinds),
        tuple(tuple(x) for x in bld.succs),
        tuple(bld.labels),
    )
    return BridgeResult(game, s, b_bits, g_bits, scale)
