"""Game models, parsers, exact brute-force oracles and game-level reductions.

Covers parity games, (stochastic) mean payoff games and simple stochastic
games with Win/Lose terminals, all over exact rationals.  The brute-force
solvers enumerate positional policy pairs and are capped; they exist as
independent oracles for the rest of the pipeline.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .linalg import solve_linear_exact
from .maxavg import (
    AvgLe,
    Const,
    GeConst,
    MaxAvgInstance,
    MaxLe,
    MinLe,
    normalize,
)

EVEN, ODD = 0, 1

# node kinds
MIN, MAX, AVG, WIN, LOSE = "MIN", "MAX", "AVG", "WIN", "LOSE"

DEFAULT_CAP = 10
# Guard against policy-pair blowup independently of the node cap.
MAX_POLICY_PAIRS = 2_000_000


class GameError(ValueError):
    pass


class CapExceeded(GameError):
    pass


# ---------------------------------------------------------------------------
# Parity games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParityGame:
    """Max-parity game: the winner of a play is the parity of the highest
    priority seen infinitely often (0 = player Even)."""

    priorities: tuple[int, ...]
    owners: tuple[int, ...]
    successors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()
    id_map: tuple[int, ...] = ()  # dense index -> original pgsolver id

    def __post_init__(self):
        n = self.n
        if len(self.owners) != n or len(self.successors) != n:
            raise GameError("field lengths disagree")
        for i, succs in enumerate(self.successors):
            if not succs:
                raise GameError(f"node {i} has no successors")
            for s in succs:
                if not 0 <= s < n:
                    raise GameError(f"node {i}: dangling successor {s}")
        if any(p < 0 for p in self.priorities):
            raise GameError("priorities must be nonnegative")
        if any(o not in (EVEN, ODD) for o in self.owners):
            raise GameError("owners must be 0 (Even) or 1 (Odd)")

    @property
    def n(self) -> int:
        return len(self.priorities)


_PG_STMT = re.compile(
    r"^\s*(\d+)\s+(\d+)\s+([01])\s+([0-9,\s]+?)\s*(?:\"([^\"]*)\")?\s*$"
)


def parse_pgsolver(text: str) -> ParityGame:
    """Parse the pgsolver format: ``parity N;`` then ``id prio owner succs [name];``.

    Node ids are renumbered densely (order of first appearance); the
    original ids are kept in ``id_map``.
    """
    stmts: list[tuple[int, str]] = []
    lineno = 1
    for chunk in text.split(";"):
        lineno += chunk.count("\n")
        stmt = chunk.strip()
        if stmt:
            stmts.append((lineno, stmt))
    if not stmts:
        raise GameError("empty input")
    head_line, head = stmts[0]
    if not head.lower().startswith("parity"):
        raise GameError(f"line {head_line}: expected 'parity <n>;' header")
    records: list[tuple[int, int, int, list[int], Optional[str]]] = []
    for lineno, stmt in stmts[1:]:
        m = _PG_STMT.match(stmt)
        if not m:
            raise GameError(f"line {lineno}: cannot parse node statement {stmt!r}")
        ident, prio, owner = int(m.group(1)), int(m.group(2)), int(m.group(3))
        succs = [int(t) for t in m.group(4).replace(",", " ").split()]
        if not succs:
            raise GameError(f"line {lineno}: node {ident} has no successors")
        records.append((ident, prio, owner, succs, m.group(5)))
    index = {rec[0]: i for i, rec in enumerate(records)}
    if len(index) != len(records):
        raise GameError("duplicate node id")
    prios, owners, succs_out, labels, id_map = [], [], [], [], []
    for ident, prio, owner, succs, name in records:
        for s in succs:
            if s not in index:
                raise GameError(f"node {ident}: dangling successor id {s}")
        prios.append(prio)
        owners.append(owner)
        succs_out.append(tuple(index[s] for s in succs))
        labels.append(name if name is not None else str(ident))
        id_map.append(ident)
    return ParityGame(
        tuple(prios), tuple(owners), tuple(succs_out), tuple(labels), tuple(id_map)
    )


def serialize_pgsolver(g: ParityGame) -> str:
    lines = [f"parity {g.n - 1};"]
    for i in range(g.n):
        succ = ",".join(str(s) for s in g.successors[i])
        label = f' "{g.labels[i]}"' if g.labels else ""
        lines.append(f"{i} {g.priorities[i]} {g.owners[i]} {succ}{label};")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Stochastic mean payoff games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StochasticMeanPayoffGame:
    """Edge-weighted game graph with a Min/Max/Random node partition.

    ``weights[i][j]`` is the payoff on the j-th outgoing edge of node i;
    ``probs[i]`` is the outgoing distribution for random nodes (None
    elsewhere).
    """

    kinds: tuple[str, ...]  # MIN | MAX | AVG (AVG = random)
    successors: tuple[tuple[int, ...], ...]
    weights: tuple[tuple[Fraction, ...], ...]
    probs: tuple[Optional[tuple[Fraction, ...]], ...] = None  # type: ignore[assignment]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        n = self.n
        if self.probs is None:
            object.__setattr__(
                self, "probs", tuple(None for _ in range(n))
            )
        for i in range(n):
            if not self.successors[i]:
                raise GameError(f"node {i} has no successors")
            if len(self.weights[i]) != len(self.successors[i]):
                raise GameError(f"node {i}: weight arity mismatch")
            if self.kinds[i] == AVG:
                p = self.probs[i]
                if p is None or len(p) != len(self.successors[i]):
                    raise GameError(f"random node {i} needs a full distribution")
                if any(q < 0 for q in p) or sum(p) != 1:
                    raise GameError(f"node {i}: distribution must be nonnegative, sum 1")
            elif self.kinds[i] not in (MIN, MAX):
                raise GameError(f"node {i}: bad kind {self.kinds[i]!r}")

    @property
    def n(self) -> int:
        return len(self.kinds)

    @property
    def is_deterministic(self) -> bool:
        return all(k != AVG for k in self.kinds)


def parity_to_mpg(g: ParityGame) -> StochasticMeanPayoffGame:
    """Reduce a parity game to a deterministic mean payoff game.

    Every edge leaving a node of priority p gets weight (-(n+1))^p, which
    makes the top priority of any cycle dominate the rest; Even then wins
    a node exactly when the mean payoff value there is >= 0.
    """
    base = -(g.n + 1)
    kinds = tuple(MAX if o == EVEN else MIN for o in g.owners)
    weights = tuple(
        tuple(Fraction(base**g.priorities[i]) for _ in g.successors[i])
        for i in range(g.n)
    )
    return StochasticMeanPayoffGame(kinds, g.successors, weights, labels=g.labels)


# ---------------------------------------------------------------------------
# Simple stochastic games
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimpleStochasticGame:
    """Win/Lose reachability game with fair-coin random nodes.

    Terminals are absorbing; the payoff structure (weight 1 on the Win
    self-loop, 0 elsewhere) is implied and not stored.
    """

    kinds: tuple[str, ...]  # MIN | MAX | AVG | WIN | LOSE
    successors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        wins = [i for i, k in enumerate(self.kinds) if k == WIN]
        loses = [i for i, k in enumerate(self.kinds) if k == LOSE]
        if len(wins) != 1 or len(loses) != 1:
            raise GameError("exactly one Win and one Lose terminal required")
        for i, k in enumerate(self.kinds):
            succs = self.successors[i]
            if k in (WIN, LOSE):
                if succs != (i,):
                    raise GameError(f"terminal {i} must self-loop")
            elif k == AVG:
                if len(succs) != 2:
                    raise GameError(f"random node {i} must have out-degree 2")
            elif k in (MIN, MAX):
                if not succs:
                    raise GameError(f"node {i} has no successors")
            else:
                raise GameError(f"node {i}: bad kind {k!r}")
            for s in succs:
                if not 0 <= s < self.n:
                    raise GameError(f"node {i}: dangling successor {s}")

    @property
    def n(self) -> int:
        return len(self.kinds)

    @property
    def win(self) -> int:
        return self.kinds.index(WIN)

    @property
    def lose(self) -> int:
        return self.kinds.index(LOSE)

    def choice_nodes(self, kind: str) -> list[int]:
        return [i for i, k in enumerate(self.kinds) if k == kind]


def parse_ssg(text: str) -> SimpleStochasticGame:
    """Line format: header ``ssg <n>``, then ``id KIND succ...`` per node."""
    lines = [
        (no, ln.split("#", 1)[0].strip())
        for no, ln in enumerate(text.splitlines(), start=1)
    ]
    lines = [(no, ln) for no, ln in lines if ln]
    if not lines or not lines[0][1].lower().startswith("ssg"):
        raise GameError("expected 'ssg <n>' header")
    n = int(lines[0][1].split()[1])
    kinds: list[Optional[str]] = [None] * n
    succs: list[tuple[int, ...]] = [()] * n
    for no, ln in lines[1:]:
        toks = ln.split()
        try:
            i = int(toks[0])
            kind = toks[1].upper()
            out = tuple(int(t) for t in toks[2:])
        except (ValueError, IndexError) as exc:
            raise GameError(f"line {no}: {exc}") from exc
        if not 0 <= i < n:
            raise GameError(f"line {no}: node id {i} out of range")
        if kinds[i] is not None:
            raise GameError(f"line {no}: duplicate node {i}")
        if kind in (WIN, LOSE) and not out:
            out = (i,)
        kinds[i] = kind
        succs[i] = out
    if any(k is None for k in kinds):
        missing = [i for i, k in enumerate(kinds) if k is None]
        raise GameError(f"nodes without a declaration: {missing}")
    return SimpleStochasticGame(tuple(kinds), tuple(succs))  # type: ignore[arg-type]


def serialize_ssg(g: SimpleStochasticGame) -> str:
    lines = [f"ssg {g.n}"]
    for i in range(g.n):
        lines.append(" ".join([str(i), g.kinds[i], *map(str, g.successors[i])]))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GameValue:
    values: tuple[Fraction, ...]
    max_policy: Optional[dict[int, int]] = None
    min_policy: Optional[dict[int, int]] = None


# ---------------------------------------------------------------------------
# Policy enumeration helpers
# ---------------------------------------------------------------------------


def _policies(nodes: Sequence[int], successors) -> Iterable[dict[int, int]]:
    choices = [successors[v] for v in nodes]
    for combo in itertools.product(*choices):
        yield dict(zip(nodes, combo))


def _policy_count(nodes: Sequence[int], successors) -> int:
    count = 1
    for v in nodes:
        count *= len(successors[v])
    return count


def _check_cap(n_nodes: int, cap: int, pairs: int) -> None:
    if n_nodes > cap:
        raise CapExceeded(f"{n_nodes} nodes exceeds brute-force cap {cap}")
    if pairs > MAX_POLICY_PAIRS:
        raise CapExceeded(f"{pairs} policy pairs exceeds enumeration guard")


# ---------------------------------------------------------------------------
# Deterministic mean payoff values
# ---------------------------------------------------------------------------


def _cycle_means(f: dict[int, int], weights: dict[int, Fraction], n: int) -> list[Fraction]:
    """Per-node mean of the unique cycle reached in the functional graph f."""
    means: list[Optional[Fraction]] = [None] * n
    for start in range(n):
        if means[start] is not None:
            continue
        seen: dict[int, int] = {}
        path = []
        v = start
        while v not in seen and means[v] is None:
            seen[v] = len(path)
            path.append(v)
            v = f[v]
        if means[v] is not None:
            mean = means[v]
        else:
            cycle = path[seen[v]:]
            mean = Fraction(sum(weights[u] for u in cycle), len(cycle))
        for u in path:
            means[u] = mean
    return means  # type: ignore[return-value]


def mpg_value_bruteforce(
    g: StochasticMeanPayoffGame, cap: int = DEFAULT_CAP
) -> GameValue:
    """Exact values of a deterministic mean payoff game by policy enumeration.

    Verifies positional determinacy (max-min = min-max per node) as an
    internal check.
    """
    if not g.is_deterministic:
        raise GameError("brute force requires a deterministic game")
    max_nodes = [i for i, k in enumerate(g.kinds) if k == MAX]
    min_nodes = [i for i, k in enumerate(g.kinds) if k == MIN]
    pairs = _policy_count(max_nodes, g.successors) * _policy_count(min_nodes, g.successors)
    _check_cap(g.n, cap, pairs)
    def play_values(tau: dict[int, int], sigma: dict[int, int]) -> list[Fraction]:
        # policies choose edge indices: parallel edges may carry distinct weights
        e = {**tau, **sigma}
        f = {v: g.successors[v][e[v]] for v in range(g.n)}
        w = {v: g.weights[v][e[v]] for v in range(g.n)}
        return _cycle_means(f, w, g.n)

    def edge_policies(nodes: Sequence[int]) -> Iterable[dict[int, int]]:
        ranges = [range(len(g.successors[v])) for v in nodes]
        for combo in itertools.product(*ranges):
            yield dict(zip(nodes, combo))

    best_tau: Optional[dict[int, int]] = None
    maxmin: Optional[list[Fraction]] = None
    tau_mins: list[tuple[dict[int, int], list[Fraction]]] = []
    for tau in edge_policies(max_nodes):
        lo: Optional[list[Fraction]] = None
        for sigma in edge_policies(min_nodes):
            vals = play_values(tau, sigma)
            lo = vals if lo is None else [min(a, b) for a, b in zip(lo, vals)]
        assert lo is not None
        tau_mins.append((tau, lo))
        maxmin = lo if maxmin is None else [max(a, b) for a, b in zip(maxmin, lo)]
    assert maxmin is not None
    best_tau = next(t for t, lo in tau_mins if lo == maxmin)

    minmax: Optional[list[Fraction]] = None
    sigma_maxes: list[tuple[dict[int, int], list[Fraction]]] = []
    for sigma in edge_policies(min_nodes):
        hi: Optional[list[Fraction]] = None
        for tau in edge_policies(max_nodes):
            vals = play_values(tau, sigma)
            hi = vals if hi is None else [max(a, b) for a, b in zip(hi, vals)]
        assert hi is not None
        sigma_maxes.append((sigma, hi))
        minmax = hi if minmax is None else [min(a, b) for a, b in zip(minmax, hi)]
    if maxmin != minmax:
        raise GameError("positional determinacy violated: max-min != min-max")
    best_sigma = next(s for s, hi in sigma_maxes if hi == maxmin)
    as_targets = lambda pol: {v: g.successors[v][i] for v, i in pol.items()}
    return GameValue(tuple(maxmin), as_targets(best_tau), as_targets(best_sigma))


# ---------------------------------------------------------------------------
# Zielonka oracle for parity games
# ---------------------------------------------------------------------------


def _attractor(
    g: ParityGame, player: int, target: set[int], domain: set[int]
) -> set[int]:
    attr = set(target)
    preds: dict[int, list[int]] = {v: [] for v in domain}
    for v in domain:
        for s in g.successors[v]:
            if s in domain:
                preds[s].append(v)
    out_deg = {
        v: sum(1 for s in g.successors[v] if s in domain) for v in domain
    }
    queue = list(attr)
    while queue:
        u = queue.pop()
        for v in preds[u]:
            if v in attr:
                continue
            if g.owners[v] == player:
                attr.add(v)
                queue.append(v)
            else:
                out_deg[v] -= 1
                if out_deg[v] == 0:
                    attr.add(v)
                    queue.append(v)
    return attr


def zielonka_winners(g: ParityGame) -> tuple[int, ...]:
    """Winner per node (0 = Even) by recursive attractor decomposition."""

    def solve(domain: set[int]) -> tuple[set[int], set[int]]:
        if not domain:
            return set(), set()
        p = max(g.priorities[v] for v in domain)
        player = p % 2
        opponent = 1 - player
        top = {v for v in domain if g.priorities[v] == p}
        a = _attractor(g, player, top, domain)
        w0, w1 = solve(domain - a)
        w_player, w_opp = (w0, w1) if player == EVEN else (w1, w0)
        if not w_opp:
            return (domain, set()) if player == EVEN else (set(), domain)
        b = _attractor(g, opponent, w_opp, domain)
        w0b, w1b = solve(domain - b)
        if opponent == EVEN:
            return w0b | b, w1b
        return w0b, w1b | b

    weven, _ = solve(set(range(g.n)))
    return tuple(EVEN if v in weven else ODD for v in range(g.n))


# ---------------------------------------------------------------------------
# Simple stochastic game oracles
# ---------------------------------------------------------------------------


def _induced_edges(
    g: SimpleStochasticGame, tau: dict[int, int], sigma: dict[int, int]
) -> list[tuple[int, ...]]:
    edges: list[tuple[int, ...]] = []
    for v in range(g.n):
        k = g.kinds[v]
        if k == MAX:
            edges.append((tau[v],))
        elif k == MIN:
            edges.append((sigma[v],))
        else:
            edges.append(g.successors[v])
    return edges


def _all_reach_terminals(g: SimpleStochasticGame, edges) -> bool:
    reach = {g.win, g.lose}
    changed = True
    while changed:
        changed = False
        for v in range(g.n):
            if v not in reach and any(s in reach for s in edges[v]):
                reach.add(v)
                changed = True
    return len(reach) == g.n


def ssg_check_stopping(g: SimpleStochasticGame, cap: int = DEFAULT_CAP) -> bool:
    """True iff under every policy pair every recurrent class is a terminal.

    Equivalent graph condition: in every induced graph, each node reaches
    Win or Lose.
    """
    max_nodes = g.choice_nodes(MAX)
    min_nodes = g.choice_nodes(MIN)
    pairs = _policy_count(max_nodes, g.successors) * _policy_count(min_nodes, g.successors)
    _check_cap(g.n, cap, pairs)
    for tau in _policies(max_nodes, g.successors):
        for sigma in _policies(min_nodes, g.successors):
            if not _all_reach_terminals(g, _induced_edges(g, tau, sigma)):
                return False
    return True


def _reach_probs(
    g: SimpleStochasticGame, tau: dict[int, int], sigma: dict[int, int]
) -> list[Fraction]:
    """Exact reach-Win probabilities of the Markov chain induced by (tau, sigma)."""
    interior = [v for v in range(g.n) if g.kinds[v] not in (WIN, LOSE)]
    pos = {v: i for i, v in enumerate(interior)}
    m = len(interior)
    zero, one, half = Fraction(0), Fraction(1), Fraction(1, 2)
    a = [[zero] * m for _ in range(m)]
    b = [zero] * m
    for v in interior:
        i = pos[v]
        a[i][i] += one
        k = g.kinds[v]
        succ_probs = (
            [(tau[v], one)]
            if k == MAX
            else [(sigma[v], one)]
            if k == MIN
            else [(s, half) for s in g.successors[v]]
        )
        for s, p in succ_probs:
            if s == g.win:
                b[i] += p
            elif s != g.lose:
                a[i][pos[s]] -= p
    x = solve_linear_exact(a, b)
    out = [Fraction(0)] * g.n
    out[g.win] = Fraction(1)
    for v in interior:
        out[v] = x[pos[v]]
    return out


def ssg_value_bruteforce(
    g: SimpleStochasticGame, cap: int = DEFAULT_CAP
) -> GameValue:
    """Exact SSG values: minimax over policy pairs of exact reach probabilities."""
    max_nodes = g.choice_nodes(MAX)
    min_nodes = g.choice_nodes(MIN)
    pairs = _policy_count(max_nodes, g.successors) * _policy_count(min_nodes, g.successors)
    _check_cap(g.n, cap, pairs)
    if not ssg_check_stopping(g, cap=cap):
        raise GameError("game is not stopping")

    sigma_list = list(_policies(min_nodes, g.successors))
    tau_list = list(_policies(max_nodes, g.successors))
    table = [[_reach_probs(g, tau, sigma) for sigma in sigma_list] for tau in tau_list]

    maxmin: Optional[list[Fraction]] = None
    best_tau = None
    for ti, tau in enumerate(tau_list):
        lo = [min(col) for col in zip(*table[ti])]
        maxmin = lo if maxmin is None else [max(a, b) for a, b in zip(maxmin, lo)]
    assert maxmin is not None
    for ti, tau in enumerate(tau_list):
        lo = [min(col) for col in zip(*table[ti])]
        if lo == maxmin:
            best_tau = tau
            break

    minmax: Optional[list[Fraction]] = None
    best_sigma = None
    for si, sigma in enumerate(sigma_list):
        hi = [max(table[ti][si][v] for ti in range(len(tau_list))) for v in range(g.n)]
        minmax = hi if minmax is None else [min(a, b) for a, b in zip(minmax, hi)]
    for si, sigma in enumerate(sigma_list):
        hi = [max(table[ti][si][v] for ti in range(len(tau_list))) for v in range(g.n)]
        if hi == minmax:
            best_sigma = sigma
            break
    if maxmin != minmax:
        raise GameError("positional determinacy violated: max-min != min-max")
    return GameValue(tuple(maxmin), best_tau, best_sigma)


def ssg_value_iteration(
    g: SimpleStochasticGame, iters: int, grid_bits: Optional[int] = None
) -> tuple[Fraction, ...]:
    """Iterate the one-step operator from the all-zero vector, exactly.

    Monotone nondecreasing in ``iters``; converges to the game value from
    below for stopping games.  ``grid_bits`` floors every value to the
    2^-grid_bits grid after each sweep: the result stays a lower bound on
    the game value and long runs stop growing denominators, at the cost of
    an extra error of at most iters * 2^-grid_bits.
    """
    x = [Fraction(0)] * g.n
    x[g.win] = Fraction(1)
    scale = 1 << grid_bits if grid_bits is not None else None
    for _ in range(iters):
        nxt = list(x)
        for v in range(g.n):
            k = g.kinds[v]
            if k == MAX:
                nxt[v] = max(x[s] for s in g.successors[v])
            elif k == MIN:
                nxt[v] = min(x[s] for s in g.successors[v])
            elif k == AVG:
                a, b = g.successors[v]
                nxt[v] = (x[a] + x[b]) / 2
        x = nxt
        if scale is not None:
            x = [Fraction((v.numerator * scale) // v.denominator, scale) for v in x]
    x[g.win] = Fraction(1)
    x[g.lose] = Fraction(0)
    return tuple(x)


# ---------------------------------------------------------------------------
# Reduction to max-average constraints
# ---------------------------------------------------------------------------


def ssg_to_maxavg(
    g: SimpleStochasticGame, k: int, stopping_cap: Optional[int] = DEFAULT_CAP
) -> MaxAvgInstance:
    """Constraint system that is feasible iff value(k) >= 1/2.

    One variable per node: Max nodes get a max upper bound over their
    successors, Min nodes one bound per successor, random nodes an
    averaging bound; terminals are pinned to 1 and 0 and the query node
    gets the threshold x_k >= 1/2.  Non-stopping games are rejected
    (the equivalence assumes a stopping game); pass ``stopping_cap=None``
    to skip the check for games built stopping by construction.
    """
    if not 0 <= k < g.n:
        raise GameError(f"query node {k} out of range")
    if stopping_cap is not None and not ssg_check_stopping(g, cap=stopping_cap):
        raise GameError("game is not stopping")
    cons: list = []
    for v in range(g.n):
        kind = g.kinds[v]
        if kind == MAX:
            cons.append(MaxLe(v, g.successors[v]))
        elif kind == MIN:
            cons.append(MinLe(v, g.successors[v]))
        elif kind == AVG:
            a, b = g.successors[v]
            cons.append(AvgLe(v, a, b))
        elif kind == WIN:
            cons.append(Const(v, Fraction(1)))
        else:
            cons.append(Const(v, Fraction(0)))
    cons.append(GeConst(k, Fraction(1, 2)))
    labels = g.labels if g.labels else tuple(f"n{v}" for v in range(g.n))
    sugared = MaxAvgInstance(
        g.n, tuple(cons), tuple(labels), solution_bound=Fraction(1)
    )
    return normalize(sugared)
