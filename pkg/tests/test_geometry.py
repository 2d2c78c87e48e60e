import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stretchlab.errors import InvalidMetricError, StructuralError
from stretchlab.geometry import (Cycle, Region, TriangulatedSurface, boundary_components,
                                 cycle_length, heron_areas, perimeter, region_boundary,
                                 separates, sphere_area, volume)
from stretchlab.meshes import flat_torus, torus


def test_tetrahedron_measurements(tet):
    assert tet.euler_characteristic == 2
    assert tet.total_area == pytest.approx(math.sqrt(3.0))
    one = Region.of([0])
    assert volume(tet, one) == pytest.approx(math.sqrt(3.0) / 4)
    assert perimeter(tet, one) == pytest.approx(3.0)


def test_torus_topology(small_torus):
    assert small_torus.n_faces == 24
    assert small_torus.euler_characteristic == 0


def test_flat_torus_area_is_exact():
    t = flat_torus(6, area=2.0)
    assert t.total_area == pytest.approx(2.0, rel=1e-12)
    assert np.allclose(t.face_areas, t.face_areas[0])


def test_heron_rejects_degenerate_triangle():
    with pytest.raises(InvalidMetricError):
        heron_areas(1.0, 1.0, 2.0)


def test_heron_matches_cross_product():
    rng = np.random.default_rng(1)
    p = rng.normal(size=(50, 3, 3))
    a = np.linalg.norm(p[:, 1] - p[:, 2], axis=1)
    b = np.linalg.norm(p[:, 0] - p[:, 2], axis=1)
    c = np.linalg.norm(p[:, 0] - p[:, 1], axis=1)
    ref = 0.5 * np.linalg.norm(np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]), axis=1)
    assert np.allclose(heron_areas(a, b, c), ref, rtol=1e-10)


def test_open_mesh_is_rejected():
    with pytest.raises(StructuralError):
        TriangulatedSurface.from_coordinates(np.eye(3), [[0, 1, 2]])


def test_open_cycle_is_rejected():
    with pytest.raises(StructuralError):
        Cycle.of([(0, 1), (1, 2)])


@given(st.sets(st.integers(0, 23)))
def test_complement_has_same_perimeter(faces):
    t = torus(3, 4)
    r = Region.of(faces)
    c = r.complement(t.n_faces)
    assert perimeter(t, r) == pytest.approx(perimeter(t, c))
    assert volume(t, r) + volume(t, c) == pytest.approx(t.total_area)


@given(st.sets(st.integers(0, 23), min_size=1, max_size=23))
def test_boundary_components_sum_to_perimeter(faces):
    t = torus(3, 4)
    r = Region.of(faces)
    comps = boundary_components(t, r)
    assert sum(c.length for c in comps) == pytest.approx(perimeter(t, r))
    assert cycle_length(t, region_boundary(t, r)) == pytest.approx(perimeter(t, r))


def test_torus_meridian_does_not_separate(small_torus):
    ring = Cycle.from_loop([i * 4 for i in range(3)])
    ok, _, _ = separates(small_torus, ring)
    assert not ok


def test_dumbbell_sigma_separates(coarse):
    surf, sigma, _ = coarse
    ok, a, b = separates(surf, sigma)
    assert ok
    assert len(a) + len(b) == surf.n_faces
    assert perimeter(surf, a) == pytest.approx(cycle_length(surf, sigma))


def test_sphere_area_formula():
    assert sphere_area(1) == pytest.approx(2 * math.pi)
    assert sphere_area(2) == pytest.approx(4 * math.pi)
    assert sphere_area(3) == pytest.approx(2 * math.pi ** 2)
