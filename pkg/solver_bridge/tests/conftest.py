import subprocess

import pytest

PRODUCER = "tropic2sdp"


def run_producer(*args: str) -> str:
    proc = subprocess.run([PRODUCER, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"{PRODUCER} {' '.join(args)} failed: {proc.stderr}")
    return proc.stdout


@pytest.fixture(scope="session")
def producer_available():
    try:
        run_producer("--help")
    except (FileNotFoundError, RuntimeError):
        pytest.skip("tropic2sdp executable not on PATH")
    return PRODUCER


def reduce_text(tmp_path, name: str, source: str, *args: str) -> str:
    """Reduce a maxavg-format source file and return the emitted text."""
    src = tmp_path / f"{name}.ma"
    src.write_text(source)
    out = tmp_path / name
    run_producer("reduce", str(src), "--from", "maxavg", *args, "--out", str(out))
    return out.read_text()
