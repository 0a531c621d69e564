import math

import numpy as np
import pytest

from dbmatch import synthesis as sy

# C_p = C_s such that the primary inductance comes out at 200 pH
CP_200PH = 1.0 / ((2.0 * math.pi * 28e9) ** 2 * 200e-12 * 2.0)


@pytest.fixture(scope="session")
def worked_spec():
    """Ideal 28/38 GHz, 50/50 ohm, 150/150 fF design spec."""
    return sy.DesignSpec(28e9, 38e9, 50.0, 50.0, 150e-15, 150e-15)


@pytest.fixture(scope="session")
def worked_net(worked_spec):
    return sy.synthesize(worked_spec)


@pytest.fixture(scope="session")
def worked_net_unrefined(worked_spec):
    return sy.synthesize(worked_spec, do_refine=False)


@pytest.fixture(scope="session")
def lossy200_net():
    """Refined lossy design at the 200 pH winding operating point."""
    spec = sy.DesignSpec(
        28e9, 38e9, 50.0, 50.0, CP_200PH, CP_200PH, k_m=0.8, q_xfmr=25.0, q_t=30.0
    )
    return sy.synthesize(spec)


@pytest.fixture(scope="session")
def ideal200_net():
    spec = sy.DesignSpec(28e9, 38e9, 50.0, 50.0, CP_200PH, CP_200PH)
    return sy.synthesize(spec)


@pytest.fixture(scope="session")
def default_grid():
    return np.linspace(20e9, 45e9, 2501)


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_report(request):
    """Collects one pass/fail line per acceptance criterion; the lines are
    replayed uncaptured in the terminal summary."""

    def _record(line: str):
        _ACCEPTANCE_LINES.append(line)

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
