"""Pure-Python integer PSD kernel (fallback for the compiled extension).

Fraction-free variant of the exact Schur-complement PSD test: after a
positive pivot p the Schur complement is kept scaled by p, which preserves
all sign decisions and keeps every entry an integer.  Arbitrary-precision
ints, so no overflow concerns.
"""

from __future__ import annotations

from typing import Sequence

IMPL = "pure"


def psd_int(entries: Sequence[int], dim: int) -> bool:
    """Exact PSD test for a symmetric integer matrix given row-major."""
    if dim == 0:
        return True
    a = [list(entries[i * dim : (i + 1) * dim]) for i in range(dim)]
    size = dim
    while size > 0:
        p = a[0][0]
        if p < 0:
            return False
        if p == 0:
            if any(a[0][j] != 0 for j in range(1, size)):
                return False
            a = [row[1:] for row in a[1:]]
            size -= 1
            continue
        nxt = [
            [a[i][j] * p - a[i][0] * a[0][j] for j in range(1, size)]
            for i in range(1, size)
        ]
        a = nxt
        size -= 1
    return True


def psd_int_many(mats, dim: int):
    """Batch wrapper: iterable of flat int sequences -> list of bools."""
    return [psd_int(m, dim) for m in mats]
