"""Block LMI algebra, exact PSD checking and instance emitters.

An instance is a conjunction of blocks ``sum_i x_i A_i - B >= 0`` over a
named variable registry.  Everything is exact: coefficients are rationals
from a finite alphabet, witnesses are dyadic values, and positive
semidefiniteness is decided by an exact Schur-complement recursion.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence, Union

from . import kernels
from .dyadic import DyadicValue

SCHEMA = "tropic2sdp/1"

# origin kinds for registered variables
CSP_VAR = "csp-var"
GADGET_PRIMAL = "gadget-primal"
GADGET_DUAL = "gadget-dual"

# Every coefficient the assembler ever writes.
COEFF_ALPHABET = {
    Fraction(0),
    Fraction(1),
    Fraction(-1),
    Fraction(1, 2),
    Fraction(-1, 2),
    Fraction(2),
    Fraction(-2),
}


class SDPError(ValueError):
    pass


Entry = tuple[int, int]  # (row, col) with row <= col


@dataclass(frozen=True)
class SymBlock:
    """One block: dim, per-variable coefficient matrices and the constant
    part B, all stored as sparse upper triangles."""

    dim: int
    coeffs: Mapping[str, Mapping[Entry, Fraction]]
    const: Mapping[Entry, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        for mat in [self.const, *self.coeffs.values()]:
            for (r, c) in mat:
                if not (0 <= r <= c < self.dim):
                    raise SDPError(f"entry ({r},{c}) outside upper triangle of dim {self.dim}")

    def variables(self) -> set[str]:
        return set(self.coeffs)

    def evaluate(self, witness: Mapping[str, DyadicValue]) -> list[list[DyadicValue]]:
        """Dense symmetric matrix of the pencil at the witness point."""
        zero = DyadicValue.zero()
        m = [[zero for _ in range(self.dim)] for _ in range(self.dim)]
        for var, mat in self.coeffs.items():
            x = witness[var]
            if x.is_zero:
                continue
            for (r, c), coef in mat.items():
                v = DyadicValue.from_fraction(coef) * x
                m[r][c] = m[r][c] + v
        for (r, c), coef in self.const.items():
            m[r][c] = m[r][c] - DyadicValue.from_fraction(coef)
        for r in range(self.dim):
            for c in range(r + 1, self.dim):
                m[c][r] = m[r][c]
        return m

    def entry_count(self) -> int:
        return sum(len(mat) for mat in self.coeffs.values()) + len(self.const)


def lin_block(coeffs: Mapping[str, Fraction], const: Fraction = Fraction(0)) -> SymBlock:
    """1x1 block expressing  sum coeffs[v]*v - const >= 0."""
    return SymBlock(
        1,
        {v: {(0, 0): Fraction(c)} for v, c in coeffs.items() if c != 0},
        {(0, 0): Fraction(const)} if const != 0 else {},
    )


def equality_blocks(
    coeffs: Mapping[str, Fraction], const: Fraction = Fraction(0)
) -> list[SymBlock]:
    """Affine equality sum coeffs[v]*v = const as two opposed 1x1 blocks."""
    neg = {v: -c for v, c in coeffs.items()}
    return [lin_block(coeffs, const), lin_block(neg, -const)]


@dataclass(frozen=True)
class SDPInstance:
    """Variable registry plus an ordered block list.

    ``variables`` maps name -> origin kind; insertion order fixes the
    SDPA variable numbering.
    """

    variables: dict[str, str]
    blocks: tuple[SymBlock, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        used: set[str] = set()
        for b in self.blocks:
            used |= b.variables()
        missing = used - set(self.variables)
        if missing:
            raise SDPError(f"blocks use unregistered variables: {sorted(missing)}")
        unused = set(self.variables) - used
        if unused and self.blocks:
            raise SDPError(f"registered variables appear in no block: {sorted(unused)}")

    @property
    def n_vars(self) -> int:
        return len(self.variables)


def conjoin(parts: Sequence[SDPInstance], metadata: Optional[dict] = None) -> SDPInstance:
    """Concatenate block systems; shared variable names must agree on origin."""
    variables: dict[str, str] = {}
    blocks: list[SymBlock] = []
    meta: dict = {}
    for part in parts:
        for name, origin in part.variables.items():
            if variables.get(name, origin) != origin:
                raise SDPError(
                    f"variable {name!r} registered as both "
                    f"{variables[name]!r} and {origin!r}"
                )
            variables[name] = origin
        blocks.extend(part.blocks)
        meta.update(part.metadata)
    if metadata:
        meta.update(metadata)
    return SDPInstance(variables, tuple(blocks), meta)


# ---------------------------------------------------------------------------
# Exact PSD
# ---------------------------------------------------------------------------

Scalar = Union[int, Fraction, DyadicValue]


def _sgn(v: Scalar) -> int:
    if isinstance(v, DyadicValue):
        return v.sign
    return (v > 0) - (v < 0)


def frobenius(s: Sequence[Sequence[Fraction]], t: Sequence[Sequence[Fraction]]) -> Fraction:
    """<S, T> = sum_ij S_ij * T_ij for equal-dimension symmetric matrices."""
    n = len(s)
    if len(t) != n or any(len(r) != n for r in s) or any(len(r) != n for r in t):
        raise SDPError("dimension mismatch")
    total = Fraction(0)
    for i in range(n):
        for j in range(n):
            total += s[i][j] * t[i][j]
    return total


def psd_exact(mat: Sequence[Sequence[Scalar]]) -> bool:
    """Exact PSD test by Schur-complement recursion.

    Zero pivots require a zero row; positive pivots recurse on the exact
    Schur complement.  Integer matrices are routed through the compiled
    kernel when available.
    """
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise SDPError("matrix must be square")
    for i in range(n):
        for j in range(i + 1, n):
            if mat[i][j] != mat[j][i]:
                raise SDPError("matrix must be symmetric")
    if n == 0:
        return True
    if all(isinstance(v, int) for row in mat for v in row):
        return kernels.psd_int([v for row in mat for v in row], n)
    a = [list(row) for row in mat]
    size = n
    while size > 0:
        d = a[0][0]
        s = _sgn(d)
        if s < 0:
            return False
        if s == 0:
            if any(_sgn(a[0][j]) != 0 for j in range(1, size)):
                return False
            a = [row[1:] for row in a[1:]]
            size -= 1
            continue
        a = [
            [a[i][j] - a[i][0] * a[0][j] / d for j in range(1, size)]
            for i in range(1, size)
        ]
        size -= 1
    return True


# ---------------------------------------------------------------------------
# Witness checking
# ---------------------------------------------------------------------------

WitnessAssignment = Mapping[str, DyadicValue]


def witness_report(inst: SDPInstance, witness: WitnessAssignment) -> list[tuple[int, str]]:
    """Evaluate every block; returns (block index, reason) for each failure."""
    missing = set(inst.variables) - set(witness)
    if missing:
        raise SDPError(f"witness missing variables: {sorted(missing)}")
    failures: list[tuple[int, str]] = []
    for idx, block in enumerate(inst.blocks):
        value = block.evaluate(witness)
        if not psd_exact(value):
            failures.append((idx, f"block {idx} (dim {block.dim}) is not PSD"))
    return failures


def check_witness(inst: SDPInstance, witness: WitnessAssignment) -> bool:
    return not witness_report(inst, witness)


# ---------------------------------------------------------------------------
# Emitters
# ---------------------------------------------------------------------------


def _decimal_exact(f: Fraction) -> str:
    """Exact terminating decimal rendering; raises on non-dyadic-like input."""
    sign = "-" if f < 0 else ""
    f = abs(f)
    whole, rem = divmod(f.numerator, f.denominator)
    digits = []
    for _ in range(64):
        if rem == 0:
            break
        rem *= 10
        d, rem = divmod(rem, f.denominator)
        digits.append(str(d))
    if rem != 0:
        raise SDPError(f"value {f} has no terminating decimal form")
    return f"{sign}{whole}.{''.join(digits) or '0'}"


def _sdpa_layout(inst: SDPInstance, diag_pack: bool) -> tuple[list[int], list[tuple[SymBlock, int, int]]]:
    """Block sizes plus (block, blockno, diagonal offset) placements."""
    if diag_pack:
        big = [b for b in inst.blocks if b.dim > 1]
        ones = [b for b in inst.blocks if b.dim == 1]
        sizes = [b.dim for b in big]
        placements = [(b, i + 1, 0) for i, b in enumerate(big)]
        if ones:
            sizes.append(-len(ones))
            placements += [(b, len(big) + 1, j) for j, b in enumerate(ones)]
        return sizes, placements
    sizes = [b.dim for b in inst.blocks]
    return sizes, [(b, i + 1, 0) for i, b in enumerate(inst.blocks)]


def emit_sdpa(inst: SDPInstance, diag_pack: bool = True) -> str:
    """SDPA sparse (.dat-s) text with a zero objective (pure feasibility).

    Convention: pencil ``sum x_i F_i - F0 >= 0`` with F0 the constant
    part.  Byte-deterministic: entries sorted by (matno, block, row, col).
    """
    var_index = {name: i + 1 for i, name in enumerate(inst.variables)}
    sizes, placements = _sdpa_layout(inst, diag_pack)
    lines = [
        "*json " + json.dumps(inst.metadata, sort_keys=True, default=str),
        f"{inst.n_vars} = mDIM",
        f"{len(sizes)} = nBLOCK",
        "(" + ", ".join(str(s) for s in sizes) + ")",
        ", ".join(["0.0"] * inst.n_vars),
    ]
    entries: list[tuple[int, int, int, int, Fraction]] = []
    for block, blockno, off in placements:
        for (r, c), val in block.const.items():
            entries.append((0, blockno, r + 1 + off, c + 1 + off, val))
        for var, mat in block.coeffs.items():
            for (r, c), val in mat.items():
                entries.append((var_index[var], blockno, r + 1 + off, c + 1 + off, val))
    entries.sort(key=lambda e: e[:4])
    for matno, blockno, i, j, val in entries:
        lines.append(f"{matno} {blockno} {i} {j} {_decimal_exact(val)}")
    return "\n".join(lines) + "\n"


def emit_json(inst: SDPInstance) -> str:
    def enc_mat(mat: Mapping[Entry, Fraction]) -> list:
        return [
            [r, c, f"{v.numerator}/{v.denominator}"]
            for (r, c), v in sorted(mat.items())
        ]

    doc = {
        "schema": SCHEMA,
        "variables": [
            {"name": name, "origin": origin} for name, origin in inst.variables.items()
        ],
        "blocks": [
            {
                "dim": b.dim,
                "coeffs": {v: enc_mat(m) for v, m in sorted(b.coeffs.items())},
                "const": enc_mat(b.const),
            }
            for b in inst.blocks
        ],
        "metadata": inst.metadata,
    }
    return json.dumps(doc, indent=1, sort_keys=False, default=str)


def parse_instance_json(text: str) -> SDPInstance:
    """Inverse of :func:`emit_json`."""
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise SDPError(f"unsupported schema {doc.get('schema')!r}")

    def dec_mat(rows: Iterable) -> dict[Entry, Fraction]:
        return {(r, c): Fraction(v) for r, c, v in rows}

    variables = {v["name"]: v["origin"] for v in doc["variables"]}
    blocks = tuple(
        SymBlock(
            b["dim"],
            {v: dec_mat(m) for v, m in b["coeffs"].items()},
            dec_mat(b["const"]),
        )
        for b in doc["blocks"]
    )
    return SDPInstance(variables, blocks, doc.get("metadata", {}))


def witness_to_json(witness: WitnessAssignment) -> str:
    """Witness values as strings: powers of two stay symbolic ("2^e") so
    huge exponents round-trip; small values render as fractions."""

    def enc(v: DyadicValue) -> str:
        if v.is_zero:
            return "0"
        if v.mantissa == 1:
            return ("-" if v.sign < 0 else "") + f"2^{v.exp}"
        f = v.to_fraction()
        return f"{f.numerator}/{f.denominator}"

    return json.dumps({k: enc(v) for k, v in witness.items()}, indent=1)


def witness_from_json(text: str) -> dict[str, DyadicValue]:
    out: dict[str, DyadicValue] = {}
    for name, s in json.loads(text).items():
        neg = s.startswith("-")
        body = s[1:] if neg else s
        if body.startswith("2^"):
            v = DyadicValue.pow2(int(body[2:]))
        else:
            v = DyadicValue.from_fraction(Fraction(body))
        out[name] = -v if neg else v
    return out


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def assemble(
    system,
    params,
    gadgets: Mapping[int, "object"],
    var_names: Optional[Sequence[str]] = None,
) -> SDPInstance:
    """Assemble the final instance from a lifted system and its gadgets.

    Each power constraint pins its variable to 2^(c*K), where c*K must be
    an integer; ``gadgets[e]`` must provide a ``block_system()``/
    ``output_var`` pair realizing the singleton {2^e}.  Coefficients stay
    within the finite alphabet, so instance size is linear in the source
    system plus the gadget sizes.
    """
    from .nonarch import PowerEq, SquareLe, SumGe  # local: avoid cycle at import

    names = list(var_names) if var_names is not None else [f"x{i}" for i in range(system.n)]
    if len(names) != system.n:
        raise SDPError("variable name list has wrong length")
    variables = {name: CSP_VAR for name in names}
    blocks: list[SymBlock] = [lin_block({name: Fraction(1)}) for name in names]

    parts: list[SDPInstance] = []
    link_blocks: list[SymBlock] = []
    gadget_meta: dict[str, dict] = {}
    seen_gadgets: set[int] = set()
    for c in system.constraints:
        if isinstance(c, SumGe):
            coeffs: dict[str, Fraction] = {names[c.target]: Fraction(-1)}
            for a in dict.fromkeys(c.args):  # dedupe, keep order
                coeffs[names[a]] = coeffs.get(names[a], Fraction(0)) + 1
            blocks.append(lin_block(coeffs))
        elif isinstance(c, SquareLe):
            # merge entries: the target may coincide with an operand
            sq: dict[str, dict[Entry, Fraction]] = {}
            for var, pos in (
                (names[c.a], (0, 0)),
                (names[c.target], (0, 1)),
                (names[c.b], (1, 1)),
            ):
                mat = sq.setdefault(var, {})
                mat[pos] = mat.get(pos, Fraction(0)) + 1
            blocks.append(SymBlock(2, sq))
        elif isinstance(c, PowerEq):
            scaled = Fraction(c.exponent) * params.k
            if scaled.denominator != 1:
                raise SDPError(f"exponent {c.exponent}*K is not integral")
            e = int(scaled)
            if e not in gadgets:
                raise SDPError(f"missing gadget for exponent {e}")
            gadget = gadgets[e]
            if e not in seen_gadgets:
                seen_gadgets.add(e)
                parts.append(gadget.block_system())
                gadget_meta[gadget.prefix] = {"exponent_bits": abs(e).bit_length(), "sign": _sgn(e)}
            link_blocks.extend(
                equality_blocks(
                    {names[c.target]: Fraction(1), gadget.output_var: Fraction(-1)}
                )
            )
        else:  # pragma: no cover
            raise SDPError(f"unexpected lifted constraint {c!r}")

    core = SDPInstance(variables, tuple(blocks))
    inst = conjoin(
        [core, *parts],
        metadata={"params": params.metadata(), "gadgets": gadget_meta, "schema": SCHEMA},
    )
    inst = SDPInstance(inst.variables, inst.blocks + tuple(link_blocks), inst.metadata)
    for b in inst.blocks:
        for mat in [b.const, *b.coeffs.values()]:
            for v in mat.values():
                if v not in COEFF_ALPHABET:
                    raise SDPError(f"coefficient {v} outside the finite alphabet")
    return inst
