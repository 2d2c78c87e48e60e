import pytest
from hypothesis import settings

from stretchlab.meshes import (build_coarse_dumbbell, build_dumbbell, octahedron, tetrahedron,
                               torus)

settings.register_profile("stretchlab", max_examples=25, deadline=None)
settings.load_profile("stretchlab")


@pytest.fixture(scope="session")
def tet():
    return tetrahedron()


@pytest.fixture(scope="session")
def octa():
    return octahedron()


@pytest.fixture(scope="session")
def small_torus():
    return torus(3, 4)


@pytest.fixture(scope="session")
def coarse():
    return build_coarse_dumbbell()


@pytest.fixture(scope="session")
def fine_dumbbell():
    return build_dumbbell(0.5, 33, 16, cap_rings=14)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[k])
