from __future__ import annotations

import pytest

from fractalcalc import make_middle_p_cantor

# filled by tests/test_acceptance.py, reported in the terminal summary
ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def cantor3():
    return make_middle_p_cantor(3)


@pytest.fixture(scope="session")
def cantor4():
    return make_middle_p_cantor(4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda n: int(n.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")
