import pytest

from girthplanar.planar import RotationMap


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo checks")


@pytest.fixture
def k4_map():
    # tetrahedron: 0 in the centre of triangle 1-2-3
    return RotationMap.from_rotations(4, {0: [1, 2, 3], 1: [0, 3, 2], 2: [0, 1, 3], 3: [0, 2, 1]})
