import numpy as np
import pytest

from sofic_entropy.field import FieldSpec, FqMatrix


def circulant(coeffs: dict[int, int], n: int, p: int = 2) -> FqMatrix:
    """Matrix of multiplication by sum c_k t^k on F_p[Z/n]: column j maps to row j+k."""
    a = np.zeros((n, n), dtype=np.int64)
    for k, c in coeffs.items():
        for j in range(n):
            a[(j + k) % n, j] += c
    return FqMatrix(FieldSpec(p), a % p)


@pytest.fixture
def f2():
    return FieldSpec(2)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(k, title, ok, detail)``; returns ``ok``."""

    def record(k: int, title: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {k:2d} [{'PASS' if ok else 'FAIL'}] {title}" + (f" -- {detail}" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE):
            terminalreporter.write_line(line)
