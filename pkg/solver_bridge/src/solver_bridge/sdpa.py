"""Parser for sparse SDPA feasibility files as written by the tropic2sdp CLI.

The accepted subset: optional ``*`` comment lines, with a ``*json {...}``
line carrying instance metadata; ``<m> = mDIM``; ``<k> = nBLOCK``; a
parenthesized block-size tuple where a negative size means a diagonal
block; one objective line (ignored, feasibility instances are all-zero);
then ``matno blockno i j value`` entries with 1-based indices.  Matrix 0
is the constant side B of the pencil sum_i x_i F_i - B >= 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


class SDPAParseError(ValueError):
    pass


@dataclass(frozen=True)
class SDPAProblem:
    n_vars: int
    block_sizes: tuple[int, ...]
    # (matno, blockno, row, col) -> value, indices 1-based as in the file
    entries: tuple[tuple[int, int, int, int, float], ...]
    metadata: dict = field(default_factory=dict)

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)


def parse_sdpa(text: str) -> SDPAProblem:
    metadata: dict = {}
    lines = iter(ln.strip() for ln in text.splitlines())

    def next_content() -> str:
        for ln in lines:
            if not ln:
                continue
            if ln.startswith("*"):
                if ln.startswith("*json "):
                    try:
                        metadata.update(json.loads(ln[len("*json "):]))
                    except json.JSONDecodeError as e:
                        raise SDPAParseError(f"bad metadata comment: {e}") from e
                continue
            return ln
        raise SDPAParseError("unexpected end of file")

    def labelled_int(label: str) -> int:
        ln = next_content()
        parts = ln.split("=")
        if len(parts) != 2 or parts[1].strip() != label:
            raise SDPAParseError(f"expected '<int> = {label}', got {ln!r}")
        try:
            return int(parts[0])
        except ValueError as e:
            raise SDPAParseError(f"non-integer {label}: {ln!r}") from e

    m = labelled_int("mDIM")
    n_block = labelled_int("nBLOCK")
    if m < 0 or n_block < 0:
        raise SDPAParseError("negative dimension")

    sizes_line = next_content().strip("(){} ")
    try:
        sizes = tuple(int(t) for t in sizes_line.split(",") if t.strip()) if sizes_line else ()
    except ValueError as e:
        raise SDPAParseError(f"bad block sizes {sizes_line!r}") from e
    if len(sizes) != n_block:
        raise SDPAParseError(f"expected {n_block} block sizes, got {len(sizes)}")
    if any(s == 0 for s in sizes):
        raise SDPAParseError("zero block size")

    if n_block or m:
        obj = next_content()
        if len(obj.replace(",", " ").split()) != m:
            raise SDPAParseError("objective arity mismatch")

    entries = []
    for ln in lines:
        ln = ln.strip()
        if not ln or ln.startswith("*"):
            continue
        toks = ln.split()
        if len(toks) != 5:
            raise SDPAParseError(f"bad entry line {ln!r}")
        try:
            matno, blk, i, j = (int(t) for t in toks[:4])
            val = float(toks[4])
        except ValueError as e:
            raise SDPAParseError(f"bad entry line {ln!r}") from e
        if not 0 <= matno <= m:
            raise SDPAParseError(f"matrix index {matno} out of range")
        if not 1 <= blk <= n_block:
            raise SDPAParseError(f"block index {blk} out of range")
        dim = abs(sizes[blk - 1])
        if not (1 <= i <= dim and 1 <= j <= dim):
            raise SDPAParseError(f"entry ({i},{j}) outside block {blk}")
        if sizes[blk - 1] < 0 and i != j:
            raise SDPAParseError(f"off-diagonal entry in diagonal block {blk}")
        entries.append((matno, blk, i, j, val))
    return SDPAProblem(m, sizes, tuple(entries), metadata)
