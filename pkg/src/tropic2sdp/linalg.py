"""Exact rational linear solving via fraction-free (Bareiss) elimination."""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


class SingularMatrixError(ValueError):
    pass


def solve_linear_exact(
    a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]
) -> list[Fraction]:
    """Solve A x = b exactly for square nonsingular rational A.

    Denominators are cleared row-wise, then Bareiss one-step fraction-free
    elimination runs over integers.  Pivot selection: first row with a
    nonzero entry (determinism over speed).
    """
    n = len(a)
    if any(len(row) != n for row in a) or len(b) != n:
        raise ValueError("shape mismatch")
    # Integer augmented matrix, one scaling factor per row.
    m: list[list[int]] = []
    for i in range(n):
        row = [Fraction(x) for x in a[i]] + [Fraction(b[i])]
        scale = lcm(*(x.denominator for x in row))
        m.append([int(x * scale) for x in row])

    prev_pivot = 1
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot_row is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
        pivot = m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col]
            row_r, row_c = m[r], m[col]
            for c in range(col, n + 1):
                row_r[c] = (row_r[c] * pivot - factor * row_c[c]) // prev_pivot
        prev_pivot = pivot

    x: list[Fraction] = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(m[i][n])
        for j in range(i + 1, n):
            acc -= m[i][j] * x[j]
        x[i] = acc / m[i][i]
    return x
