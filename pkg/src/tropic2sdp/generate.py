"""Seeded instance generators for tests, corpora and size studies."""

from __future__ import annotations

import random
from fractions import Fraction

from .games import AVG, LOSE, MAX, MIN, WIN, SimpleStochasticGame
from .maxavg import (
    AvgLe,
    Const,
    GeConst,
    LeConst,
    MaxAvgInstance,
    MaxLe,
    MinLe,
)


def gen_random_ssg(seed: int, size: int) -> SimpleStochasticGame:
    """Random stopping game with ``size`` interior nodes plus terminals.

    Stopping holds by construction: Min/Max successors only point forward
    (toward the terminals) and every random node keeps one forward branch,
    so under any policy pair each node escapes to a terminal with positive
    probability.
    """
    if size < 2:
        raise ValueError("size must be at least 2")
    rng = random.Random(seed)
    win, lose = size, size + 1
    kinds: list[str] = []
    succs: list[tuple[int, ...]] = []
    for i in range(size):
        forward = list(range(i + 1, size + 2))
        kind = rng.choice((MIN, MAX, AVG))
        kinds.append(kind)
        if kind == AVG:
            ahead = rng.choice(forward)
            other = rng.choice(list(range(size)) + [win, lose])
            pair = [ahead, other]
            rng.shuffle(pair)
            succs.append(tuple(pair))
        else:
            out = rng.sample(forward, rng.randint(1, min(3, len(forward))))
            succs.append(tuple(out))
    kinds += [WIN, LOSE]
    succs += [(win,), (lose,)]
    return SimpleStochasticGame(tuple(kinds), tuple(succs))


def gen_random_maxavg(seed: int, size: int) -> MaxAvgInstance:
    """Random constraint system over ``size`` variables, reproducible under
    the seed.  Mixes core and sugared constraint forms."""
    if size < 2:
        raise ValueError("size must be at least 2")
    rng = random.Random(seed)
    consts = [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-1), Fraction(3, 4)]
    constraints = []
    for _ in range(rng.randint(size, 2 * size)):
        roll = rng.random()
        t = rng.randrange(size)
        if roll < 0.35:
            args = tuple(rng.sample(range(size), rng.randint(1, min(3, size))))
            constraints.append(MaxLe(t, args))
        elif roll < 0.6:
            constraints.append(AvgLe(t, rng.randrange(size), rng.randrange(size)))
        elif roll < 0.75:
            constraints.append(Const(t, rng.choice(consts)))
        elif roll < 0.85:
            args = tuple(rng.sample(range(size), rng.randint(1, min(3, size))))
            constraints.append(MinLe(t, args))
        elif roll < 0.95:
            constraints.append(LeConst(t, rng.choice(consts)))
        else:
            constraints.append(GeConst(t, rng.choice(consts)))
    return MaxAvgInstance(size, tuple(constraints))


def gen_chain_ssg(n: int) -> SimpleStochasticGame:
    """Coin chain of length n: node i flips toward node i+1 or loses.

    Values halve along the chain (v_i = 2^-(n-i)); used for size-scaling
    studies since instance sizes grow with n while the constant alphabet
    stays fixed.
    """
    if n < 1:
        raise ValueError("chain length must be positive")
    win, lose = n, n + 1
    kinds = tuple([AVG] * n + [WIN, LOSE])
    succs = tuple(
        [(i + 1 if i + 1 < n else win, lose) for i in range(n)] + [(win,), (lose,)]
    )
    return SimpleStochasticGame(kinds, succs)
