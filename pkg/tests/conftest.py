import pytest

from practical_bounds.aggregation import augmented_table
from practical_bounds.bounds import compute_bounds

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def reports():
    """Memoised ``compute_bounds`` keyed by (N, threads)."""
    cache = {}

    def get(N: int, threads: int = 1):
        if (N, threads) not in cache:
            cache[N, threads] = compute_bounds(N, 13, threads=threads)
        return cache[N, threads]

    return get


@pytest.fixture(scope="session")
def table_1e6():
    return augmented_table(10**6, 13)


@pytest.fixture
def record():
    def emit(criterion: int, passed: bool, detail: str) -> None:
        line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
