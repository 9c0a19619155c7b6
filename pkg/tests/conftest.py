import numpy as np
import pytest

from apptemp.operators import DensityMatrix

_ACCEPTANCE_LINES = []


class AcceptanceLog:
    """Records one verdict line per criterion; printed in the terminal summary."""

    def check(self, number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        assert ok, line


@pytest.fixture
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def trace_distance(a, b):
    a = a.data if isinstance(a, DensityMatrix) else np.asarray(a)
    b = b.data if isinstance(b, DensityMatrix) else np.asarray(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(a - b))))


def ket(*bits):
    """Computational basis ket of a qubit register, ``0 = g``."""
    v = np.zeros(2 ** len(bits), dtype=np.complex128)
    v[int("".join(map(str, bits)), 2)] = 1
    return v
