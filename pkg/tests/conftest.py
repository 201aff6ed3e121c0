import pytest

from cmes.eds import solve_eds
from cmes.eisenstein import EisensteinContext
from cmes.exact import TruncationParams


@pytest.fixture(scope="session")
def beta63():
    return solve_eds(6, 3)


@pytest.fixture(scope="session")
def ctx63(beta63):
    """Reference truncation W=6, D=3, N=30."""
    return EisensteinContext(beta63, TruncationParams(6, 3, 30))


@pytest.fixture(scope="session")
def ctx_small():
    return EisensteinContext(solve_eds(5, 3), TruncationParams(5, 3, 10))


@pytest.fixture(scope="session")
def beta84():
    return solve_eds(8, 4)


# one line per acceptance criterion, filled in by tests/test_acceptance.py
ACCEPTANCE_LINES: dict = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
