import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from stretchlab.errors import InputError, PreconditionError
from stretchlab.experiment import _side_of
from stretchlab.conformal import warped_case
from stretchlab.geometry import IntervalRegion, perimeter
from stretchlab.surgery import (IntervalCollar, StretchParams, cylindrical_interpolation,
                                locality_violations, make_cutoff, max_plateau_band, plan_surgery,
                                rim_distances, side_collars, stretch, stretch_family,
                                stretched_distance, valid_band_counts, verify_surgery,
                                warped_volumes)


@pytest.fixture(scope="module")
def fine_family(fine_dumbbell):
    surf, sigma, collar = fine_dumbbell
    _, cut = plan_surgery(surf, collar)
    Rs = [cut.epsilon / 3, 2.0, 4.0, 8.0, 16.0]
    g_tilde, ms = stretch_family(surf, collar, Rs, cutoff=cut)
    return surf, sigma, collar, g_tilde, ms


def test_cutoff_shape():
    c = make_cutoff(3.0)
    assert c(0.0) == 0.0 and c(0.7) == 0.0 and c(2.3) == 0.0 and c(3.0) == 0.0
    assert c(1.0) == 1.0 and c(1.5) == 1.0 and c(2.0) == 1.0
    t = np.linspace(0.75, 1.0, 200)
    assert np.all(np.diff(c(t)) >= 0)


def test_cutoff_is_mirror_symmetric():
    c = make_cutoff(1.0)
    t = np.linspace(0, 1, 1001)
    assert np.allclose(c(t), c(1 - t), atol=1e-12)


def test_strictly_cylindrical_band_counts():
    assert valid_band_counts(12, cylindrical_plateau=True) == [4, 7]
    assert 3 not in valid_band_counts(12)


def test_bad_band_count_is_rejected(fine_dumbbell):
    _, _, collar = fine_dumbbell
    with pytest.raises(PreconditionError):
        side_collars(collar, 3)


def test_R_below_ell_is_rejected():
    with pytest.raises(InputError):
        StretchParams(0.1, 0.5)


@given(st.floats(1.0, 50.0), st.floats(0.3, 5.0))
def test_plateau_distance_is_R(R_over_ell, eps):
    cut = make_cutoff(eps)
    params = StretchParams(R_over_ell * eps / 3, eps / 3)
    d = stretched_distance(cut, params, eps / 3, 2 * eps / 3)
    assert d == pytest.approx(params.R, rel=1e-14)
    assert stretched_distance(cut, params, 0.0, eps) >= d


def test_unstretched_distance_is_collar_width():
    cut = make_cutoff(1.2)
    d = stretched_distance(cut, StretchParams(0.4, 0.4), 0.0, 1.2)
    assert d == pytest.approx(1.2, rel=1e-12)


def test_perimeter_preserved_bit_exact(fine_family):
    surf, sigma, collar, _, ms = fine_family
    omega = _side_of(surf, sigma, collar)
    p0 = perimeter(surf, omega)
    assert all(perimeter(g.geometry, omega) == p0 for g in ms)


def test_verify_surgery_passes(fine_family):
    surf, sigma, collar, g_tilde, ms = fine_family
    rep = verify_surgery(surf, ms, sigma, _side_of(surf, sigma, collar), g_tilde.cylinder_region)
    assert rep.ok, rep.violations
    assert len(set(rep.volume_outside_cylinder)) == 1
    assert all(r < 1e-9 for r in rep.residuals.values())
    assert all(s > 0 for s in rep.slopes.values())


def test_rim_distance_within_one_band(fine_family):
    *_, ms = fine_family
    for g in ms:
        band = max_plateau_band(g)
        assert all(abs(d - g.R) <= band for d in rim_distances(g))


def test_changes_stay_in_the_collar(fine_family):
    surf, sigma, _, _, ms = fine_family
    for g in ms:
        assert locality_violations(surf, g.geometry, g, sigma) == []


def test_provenance_block(fine_family):
    *_, ms = fine_family
    prov = ms[-1].provenance
    assert {"epsilon", "ell", "R", "eta_spec"} <= set(prov)
    assert prov["R"] == 16.0
    assert prov["ell"] == pytest.approx(prov["epsilon"] / 3)


def test_stretch_twice_is_rejected(fine_family):
    *_, ms = fine_family
    with pytest.raises(PreconditionError):
        stretch(ms[-1], StretchParams(20.0, ms[-1].ell))


def test_warped_surgery_volumes():
    w = warped_case("neck", 2)
    side = IntervalCollar(-0.6, 0.9)
    cut = make_cutoff(0.9)
    g_tilde = cylindrical_interpolation(w, side, cut)
    omega = IntervalRegion.of([(w.start, 0.0)])
    Rs = np.array([0.3, 1.0, 2.0, 4.0])
    vols = np.array([warped_volumes(stretch(g_tilde, StretchParams(R, 0.3)), omega) for R in Rs])
    # every volume grows; only the plateau volume is affine, since the smooth
    # transitions scale by sqrt(rho_R), which is not linear in R
    assert np.all(np.diff(vols, axis=0) > 0)
    slope, icpt = np.polyfit(Rs, vols[:, 2], 1)
    assert slope > 0
    assert np.max(np.abs(vols[:, 2] - (slope * Rs + icpt))) < 1e-9 * vols[:, 2].max()


def test_warped_cylinder_is_cylindrical():
    w = warped_case("sphere", 1)
    side = IntervalCollar(0.5, 0.9)
    g = cylindrical_interpolation(w, side, make_cutoff(0.9))
    t = g.geometry.grid
    (a, b), = g.cylinder_region.intervals
    inside = (t >= a) & (t <= b)
    assert np.ptp(g.geometry.warp[inside]) == 0.0
    assert g.h_gamma == pytest.approx(math.sin(1.4), rel=1e-3)


def test_rho_values():
    cut = make_cutoff(3.0)
    params = StretchParams(10.0, 1.0)
    assert cut.rho(1.5, params) == 100.0
    assert cut.rho(0.3, params) == 1.0


def test_R_equal_ell_is_identity(fine_dumbbell):
    surf, _, collar = fine_dumbbell
    _, cut = plan_surgery(surf, collar)
    g_tilde, (g,) = stretch_family(surf, collar, [cut.epsilon / 3], cutoff=cut)
    assert np.array_equal(g.geometry.lengths, g_tilde.geometry.lengths)


def test_lengths_monotone_in_R_and_dominating(fine_family):
    surf, _, _, g_tilde, ms = fine_family
    assert np.all(g_tilde.geometry.lengths >= surf.lengths)
    for a, b in zip(ms, ms[1:]):
        assert np.all(b.geometry.lengths >= a.geometry.lengths)


def test_plateau_rings_equal_h_gamma(fine_family):
    *_, g_tilde, _ = fine_family
    s = g_tilde.geometry
    for side, hg in zip(g_tilde.sides, g_tilde.h_gamma):
        ring_eta = g_tilde.cutoff.at_fraction(side.ring_fractions)
        coll = side.collar
        for j, e in zip(side.ring_indices, ring_eta):
            if e == 1.0:
                assert np.array_equal(s.lengths[coll.fibre_edges(s, j)], hg)
