import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stretchlab.conformal import (apply_conformal, conformal_mean_curvature, conformal_residuals,
                                  conformal_ricci_normal, cotan_laplacian_apply, cotan_matrices,
                                  cycle_stability_form, gauss_curvature, make_minimal,
                                  make_strictly_stable, mesh_mean_curvature, warped_case,
                                  warped_curvature, zero_factor)
from stretchlab.errors import InputError, PreconditionError
from stretchlab.geometry import LevelSet, WarpedInterval
from stretchlab.meshes import build_ring_metric, flat_torus, octahedron, torus

CASES = [("sphere", 1.4), ("cylinder", 0.0), ("neck", 0.3)]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_warped_curvature_closed_forms(n):
    c = 1.1
    s = warped_curvature(warped_case("sphere", n), c)
    assert s.mean_curvature[0] == pytest.approx(math.cos(c) / math.sin(c))
    assert s.ricci_normal[0] == pytest.approx(n)
    z = warped_curvature(warped_case("cylinder", n), 0.2)
    assert z.mean_curvature[0] == 0.0 and z.ricci_normal[0] == 0.0
    k = warped_curvature(warped_case("neck", n), 0.3)
    assert k.mean_curvature[0] == pytest.approx(math.tanh(0.3))
    assert k.ricci_normal[0] == pytest.approx(-n)


def test_zero_factor_changes_nothing():
    w = warped_case("neck", 2)
    a = warped_curvature(w, 0.3)
    b = warped_curvature(w, 0.3, zero_factor())
    assert np.allclose(a.mean_curvature, b.mean_curvature)
    assert np.allclose(a.ricci_normal, b.ricci_normal)


@pytest.mark.parametrize("name,c", CASES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_minimal_then_strictly_stable(name, c, n):
    w = warped_case(name, n)
    f1 = make_minimal(w, LevelSet(c))
    assert abs(warped_curvature(w, c, f1).mean_curvature[0]) < 1e-12
    f2, form = make_strictly_stable(w, LevelSet(c), 1.0, base=f1)
    after = warped_curvature(w, c, f1 + f2)
    assert abs(after.mean_curvature[0]) < 1e-12
    assert after.potential[0] <= -1.0 + 1e-12
    if n == 1:
        assert form.strictly_stable


@pytest.mark.parametrize("name,c", CASES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_formulas_match_finite_differences(name, c, n):
    w = warped_case(name, n)
    f1 = make_minimal(w, LevelSet(c))
    f2, _ = make_strictly_stable(w, LevelSet(c), 1.0, base=f1)
    f = f1 + f2
    h1, r1 = conformal_residuals(w, c, f, 1e-3)
    h2, r2 = conformal_residuals(w, c, f, 5e-4)
    assert h1 <= 1e-6 and r1 <= 1e-6
    for a, b in ((h1, h2), (r1, r2)):
        if a > 1e-12:
            assert 3.0 < a / b < 5.0


@given(st.floats(0.1, 10.0), st.integers(3, 40), st.floats(-3.0, 3.0))
def test_constant_potential_cycle(length, m, V):
    form = cycle_stability_form(np.full(m, length / m), V)
    assert form.lambda_min == pytest.approx(-V, abs=1e-9)
    assert np.allclose(form.eigenvector, form.eigenvector[0])


def test_cycle_form_needs_a_polygon():
    with pytest.raises(InputError):
        cycle_stability_form([1.0, 1.0], 0.0)


def test_gauss_bonnet():
    for surf, chi in ((octahedron(), 2), (torus(5, 7), 0)):
        _, M = cotan_matrices(surf)
        total = float(gauss_curvature(surf) @ M)
        assert total == pytest.approx(2 * math.pi * chi, abs=1e-9)


def test_laplacian_of_a_mode_on_flat_torus():
    n = 32
    surf = flat_torus(n, 1.0)
    i = np.arange(n * n) // n
    v = np.cos(2 * np.pi * i / n)
    lap = cotan_laplacian_apply(surf, v)
    assert np.allclose(lap, -(2 * np.pi) ** 2 * v, rtol=1e-2, atol=1e-9)


def test_mesh_minimal_factor(coarse):
    surf, sigma, collar = coarse
    assert np.max(np.abs(mesh_mean_curvature(surf, collar))) > 0.1
    f1 = make_minimal(surf, sigma, collar=collar)
    g = apply_conformal(surf, f1)
    assert np.max(np.abs(mesh_mean_curvature(g, collar))) < 1e-10
    # the factor vanishes on sigma, so sigma keeps its length
    sig = surf.edge_ids(sigma.edges)
    assert np.array_equal(g.lengths[sig], surf.lengths[sig])


def test_mesh_strictly_stable(coarse):
    surf, sigma, collar = coarse
    f1 = make_minimal(surf, sigma, collar=collar)
    _, form = make_strictly_stable(surf, sigma, 1.0, collar=collar, base=f1)
    assert form.strictly_stable
    assert form.lambda_min >= 1.0 - 1e-9


def test_constant_factor_scales_curvature():
    assert conformal_mean_curvature(1.0, math.log(2.0), 0.0) == pytest.approx(0.5)
    assert conformal_mean_curvature(1.0, 0.0, 1.0) == 0.0
    for f in (-1.0, 0.3, 2.0):
        assert conformal_mean_curvature(0.7, f, 0.0) == math.exp(-f) * 0.7


def test_linear_warp_made_minimal():
    w = WarpedInterval.from_function(lambda t: 1 + t, np.ones_like, np.zeros_like, 1.0, 1,
                                     start=-0.5)
    f1 = make_minimal(w, LevelSet(0.0))
    assert f1.normal_derivative[0] == pytest.approx(1.0)
    assert abs(warped_curvature(w, 0.0, f1).mean_curvature[0]) < 1e-6


def test_sphere_equator_needs_c_one():
    _, form = make_strictly_stable(warped_case("sphere", 1), LevelSet(math.pi / 2), 1.0)
    assert form.lambda_min == pytest.approx(1.0)
    unstable = cycle_stability_form(np.full(64, 2 * math.pi / 64), 1.0)
    assert unstable.lambda_min == pytest.approx(-1.0) and not unstable.strictly_stable


def test_flat_cylinder_needs_c_half():
    surf, sigma, collar = build_ring_metric([3.0] * 11, [0.5] * 10, 12, 5)
    f2, form = make_strictly_stable(surf, sigma, 1.0, collar=collar)
    assert f2.coefficient == 0.5
    assert form.lambda_min == pytest.approx(1.0)
    ric = conformal_ricci_normal(surf, f2, sigma, collar=collar, specialized=True)
    assert np.allclose(ric, -1.0)
    assert np.allclose(conformal_ricci_normal(surf, f2, sigma, collar=collar), ric)


def test_specialised_form_needs_flat_factor(coarse):
    surf, sigma, collar = coarse
    f1 = make_minimal(surf, sigma, collar=collar)
    with pytest.raises(PreconditionError):
        conformal_ricci_normal(surf, f1, sigma, collar=collar, specialized=True)


@given(st.lists(st.floats(-3, 3), min_size=6, max_size=6), st.floats(0.0, 2.0))
def test_lower_potential_never_lowers_lambda(V, drop):
    h = np.full(6, 0.5)
    a = cycle_stability_form(h, V).lambda_min
    b = cycle_stability_form(h, np.asarray(V) - drop).lambda_min
    assert b >= a - 1e-9
