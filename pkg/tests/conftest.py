import pytest

from nehari_ft.closedform import branch_tilde, build_stationary
from nehari_ft.core import DefectParams, HalfLineGrid

_ACCEPTANCE = {}


@pytest.fixture
def anchor():
    return DefectParams(tau=2.0, v=1.0, mu=1.0, omega=1.0)


@pytest.fixture(scope="session")
def anchor_grid():
    return HalfLineGrid(40.0, 4000)


@pytest.fixture(scope="session")
def anchor_state(anchor_grid):
    p = DefectParams(2.0, 1.0, 1.0, 1.0)
    return build_stationary(branch_tilde(p), anchor_grid)


@pytest.fixture
def accept():
    """record(n, passed, detail): stores one acceptance line, printed in the summary."""

    def record(n, passed, detail=""):
        _ACCEPTANCE[n] = (bool(passed), detail)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[n]
        terminalreporter.write_line(f"[ACCEPT {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
