import math

import pytest

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Register the outcome of a numbered exit criterion for the end-of-run summary."""
    def record(number: int, title: str, passed: bool, detail: str = ""):
        ACCEPTANCE_RESULTS[number] = (title, bool(passed), detail)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, passed, detail = ACCEPTANCE_RESULTS[number]
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number:2d}. {title}" + (f" -- {detail}" if detail else ""))


def naive_cd2(points) -> float:
    """Centered L2 discrepancy by explicit loops over rows, row pairs and coordinates."""
    n = len(points)
    s = len(points[0])
    first = 0.0
    for i in range(n):
        prod = 1.0
        for j in range(s):
            d = points[i][j] - 0.5
            prod *= 2.0 + abs(d) - d * d
        first += prod
    second = 0.0
    for i in range(n):
        for l in range(n):
            prod = 1.0
            for j in range(s):
                xi, xl = points[i][j], points[l][j]
                prod *= 1.0 + 0.5 * abs(xi - 0.5) + 0.5 * abs(xl - 0.5) - 0.5 * abs(xi - xl)
            second += prod
    sq = (13.0 / 12.0) ** s - 2.0 ** (1 - s) / n * first + second / n ** 2
    return math.sqrt(max(sq, 0.0))


def totient(n: int) -> int:
    """Euler's phi by trial-division factorisation."""
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result
