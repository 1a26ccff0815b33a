import mpmath
import pytest

from modjac import modsym, periods


@pytest.fixture(autouse=True)
def _precision():
    with mpmath.workprec(128):
        yield


@pytest.fixture(scope="session")
def space63():
    return modsym.build_space(63)


@pytest.fixture(scope="session")
def class63(space63):
    (cls,) = modsym.decompose(space63)
    return cls


@pytest.fixture(scope="session")
def lattice63(class63):
    return modsym.integral_homology(class63)


@pytest.fixture(scope="session")
def big63(class63, lattice63):
    with mpmath.workprec(128):
        return periods.big_period_matrix(class63, lattice63, 128)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.result_lines():
        terminalreporter.write_line(line)
