import pytest

from ncdc import (SuperStructure, adjoint_representation,
                  build_from_representation, build_kappa)


@pytest.fixture(scope="session")
def abelian():
    return SuperStructure(2, 2, {}, {})


@pytest.fixture(scope="session")
def kappa2():
    return build_kappa(2, "S1", 0, [0, 1])


@pytest.fixture(scope="session")
def kappa3():
    return build_kappa(3, "S1", 0, [0, 0, 1])


@pytest.fixture(scope="session")
def sol2():
    # solvable two-dimensional bracket with K taken from the adjoint matrices;
    # passes both Jacobi laws but fails the Leibniz-compatibility condition
    C = {(1, 2, 2): 1}
    probe = SuperStructure(2, 0, C, {})
    return build_from_representation(2, C, adjoint_representation(probe))


# The acceptance tests register one line per criterion here; the hook below
# prints them after the test run so they survive pytest's output capture.
ACCEPTANCE_LINES = []


def record_criterion(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
