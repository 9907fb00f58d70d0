import pytest

from seqlab.seqcore import exact_prefix, residue_stream


def brute_sequence(N):
    """Plain-Python recurrence, independent of the library."""
    a = [0, 1]
    for n in range(2, N + 1):
        a.append(a[n - 1] + a[n // 2])
    return a


@pytest.fixture(scope="session")
def seq10k():
    return brute_sequence(10_000)


@pytest.fixture(scope="session")
def prefix_1e5():
    return exact_prefix(100_000)


@pytest.fixture(scope="session")
def table32():
    return residue_stream(32, 2_000_000)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
