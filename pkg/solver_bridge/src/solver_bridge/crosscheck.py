"""Cross-check solver verdicts against the oracle verdicts of a corpus."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

from .corpus import k_of
from .solve import SolveReport, solve_sdpa


@dataclass(frozen=True)
class CrossCheckResult:
    reports: tuple[SolveReport, ...]
    by_k: dict[int, tuple[int, int]]  # K -> (agreeing, total)

    @property
    def empty(self) -> bool:
        return not self.reports

    def agreement(self, k: int) -> float:
        agree, total = self.by_k[k]
        return agree / total if total else 1.0

    def fully_agrees_at(self, k: int) -> bool:
        agree, total = self.by_k.get(k, (0, 0))
        return agree == total


def cross_check(corpus_dir: str | Path, tolerance: float = 1e-7) -> CrossCheckResult:
    """Solve every ``*.dat-s`` instance and tally agreement per K."""
    paths = sorted(Path(corpus_dir).glob("*.dat-s"))
    reports = []
    by_k: dict[int, list[int]] = {}
    for path in paths:
        rep = solve_sdpa(str(path), tolerance)
        reports.append(rep)
        k = k_of(path)
        tally = by_k.setdefault(k, [0, 0])
        tally[1] += 1
        if rep.agrees:
            tally[0] += 1
    return CrossCheckResult(
        tuple(reports), {k: (a, t) for k, (a, t) in sorted(by_k.items())}
    )


FIELDS = [
    "instance", "verdict", "residual", "tolerance", "wall_time",
    "K_bits", "oracle", "solver", "agrees",
]


def to_csv(result: CrossCheckResult) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FIELDS)
    writer.writeheader()
    for rep in result.reports:
        writer.writerow(rep.row())
    return buf.getvalue()


def to_markdown(result: CrossCheckResult) -> str:
    lines = ["| K | agreement | agreeing | total |", "|---|---|---|---|"]
    for k, (agree, total) in result.by_k.items():
        lines.append(f"| {k} | {agree / total:.1%} | {agree} | {total} |")
    disagreements = [r for r in result.reports if r.agrees is False]
    if disagreements:
        lines.append("")
        lines.append("Disagreements:")
        for r in disagreements:
            lines.append(
                f"- {r.instance}: solver {r.verdict} (residual {r.residual:.3e})"
                f" vs oracle {r.oracle}"
            )
    return "\n".join(lines) + "\n"
