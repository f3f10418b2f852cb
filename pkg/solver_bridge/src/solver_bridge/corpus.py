"""Corpus construction through the tropic2sdp command line.

The producing package is used strictly through its public interface: the
``tropic2sdp`` executable and the files it writes.  Each corpus entry is a
game reduced at several override exponents K; the exact oracle verdict
travels inside the instance's metadata comment, and K is recorded in the
file name (``<stem>_K<k>.dat-s``), since metadata only carries K's
bit-length.
"""

from __future__ import annotations

import json
import re
import subprocess
from pathlib import Path

K_PATTERN = re.compile(r"_K(\d+)\.dat-s$")

DEFAULT_KS = (8, 16, 24)


class CorpusError(RuntimeError):
    pass


def _run(args: list[str]) -> str:
    proc = subprocess.run(args, capture_output=True, text=True)
    if proc.returncode != 0:
        raise CorpusError(f"{' '.join(args)} failed ({proc.returncode}): {proc.stderr.strip()}")
    return proc.stdout


def k_of(path: Path) -> int:
    m = K_PATTERN.search(path.name)
    if not m:
        raise CorpusError(f"no _K<k> tag in {path.name}")
    return int(m.group(1))


def oracle_of(path: Path) -> str:
    with open(path) as fh:
        for line in fh:
            if line.startswith("*json "):
                return json.loads(line[len("*json "):]).get("oracle", "unknown")
    raise CorpusError(f"no metadata comment in {path.name}")


def build_corpus(
    dest: str | Path,
    count: int = 50,
    ks: tuple[int, ...] = DEFAULT_KS,
    cli: str = "tropic2sdp",
    start_seed: int = 1,
) -> list[Path]:
    """Write ``count`` game-derived instances, each at every K in ``ks``.

    Only instances with a decisive oracle verdict (feasible or infeasible)
    enter the corpus; the exact oracle occasionally answers unknown and
    such instances cannot serve as controls.
    """
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    made = 0
    seed = start_seed - 1
    while made < count:
        seed += 1
        if seed > start_seed + 40 * count:
            raise CorpusError("ran out of seeds while building the corpus")
        size = 2 + seed % 5
        game = _run([cli, "gen", "--kind", "ssg", "--size", str(size), "--seed", str(seed)])
        game_path = dest / f"src{seed:04d}.ssg"
        game_path.write_text(game)
        target = seed % (size + 2)
        group: list[Path] = []
        ok = True
        for k in ks:
            out = dest / f"inst{seed:04d}_t{target}_K{k}.dat-s"
            proc = subprocess.run(
                [
                    cli, "reduce", str(game_path), "--from", "ssg",
                    "--target", str(target), "--override-K", str(k),
                    "--out", str(out),
                ],
                capture_output=True,
                text=True,
            )
            if proc.returncode != 0:
                ok = False
                break
            if oracle_of(out) not in ("feasible", "infeasible"):
                ok = False
                break
            group.append(out)
        if ok:
            written.extend(group)
            made += 1
        else:
            for p in group:
                p.unlink(missing_ok=True)
        game_path.unlink()
    return written
