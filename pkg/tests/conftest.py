import math

import pytest

from conres import models
from conres.scene import DeltaCircleScene, DeltaLineScene, parse_scene

TWO_DELTA = DeltaLineScene((0.0, 1.0), (1.0, 1.0))
DISC = DeltaCircleScene(1.0, 5.0)

RIGHT_TRIANGLE = '{"model": "polygon", "vertices": [[0, 0], [4, 0], [0, 3]]}'
# a cup whose inner walls see each other by reflection; slightly skewed so
# that no three vertices are collinear
CUP = ('{"model": "polygon", "vertices": [[0, 0], [5, 0.2], [5.3, 3.1], [4, 3.4], '
       '[4.2, 1.1], [1.1, 0.9], [1.3, 2.9], [-0.2, 3.2]], "nontrapping_asserted": true}')


def flat_rectangle(k):
    """Rectangle whose cone points all have link length 2 pi / k."""
    rho = 2 * math.pi / k
    return ('{"model": "polygon", "vertices": [[0, 0], [2, 0], [2, 1], [0, 1]], '
            f'"link_lengths": [{rho!r}, {rho!r}, {rho!r}, {rho!r}]}}')


@pytest.fixture(scope="session")
def two_delta_full():
    """Two unit deltas at unit separation, every resonance with Re in [0.1, 500]."""
    return models.scan_resonances(models.DeltaLineModel(TWO_DELTA), (0.1, 500.0), (-12.0, -0.01))


@pytest.fixture(scope="session")
def two_delta_window(two_delta_full):
    return [r for r in two_delta_full if 50.0 <= r.re <= 500.0]


@pytest.fixture
def triangle():
    return parse_scene(RIGHT_TRIANGLE)


@pytest.fixture
def cup():
    return parse_scene(CUP)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda l: int(l.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
