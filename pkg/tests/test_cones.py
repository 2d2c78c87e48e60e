import numpy as np
import pytest
from hypothesis import given, strategies as st

from stretchlab.cones import (MeshedLink, MinimalCone, classify_stability, cone_from_dict,
                              harmonic_multiplicity, meshed_link_spectrum,
                              product_link_spectrum, radial_exponents, closed_form_law,
                              stability_threshold)
from stretchlab.errors import InputError
from stretchlab.meshes import clifford_torus


def test_harmonic_multiplicities():
    assert [harmonic_multiplicity(k, 1) for k in range(4)] == [1, 2, 2, 2]
    assert [harmonic_multiplicity(k, 2) for k in range(4)] == [1, 3, 5, 7]
    assert [harmonic_multiplicity(k, 3) for k in range(4)] == [1, 4, 9, 16]


@given(st.integers(1, 6), st.integers(1, 6))
def test_product_spectrum_against_enumeration(p, q):
    s = p + q
    r1, r2 = p / s, q / s
    naive = []
    for k in range(8):
        for m in range(8):
            v = k * (k + p - 1) / r1 + m * (m + q - 1) / r2 - s
            naive += [v] * (harmonic_multiplicity(k, p) * harmonic_multiplicity(m, q))
    naive = np.sort(naive)[:10]
    spec = product_link_spectrum(p, q, 10)
    assert np.allclose(spec.eigenvalues, naive)
    assert spec.mu1 == -s


def test_three_three_cone():
    cone = MinimalCone.product(3, 3)
    v = classify_stability(cone, product_link_spectrum(3, 3, 5))
    assert cone.n == 7
    assert v.mu1 == -6.0 and v.threshold == -6.25
    assert v.classification == "strictly stable"


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2)])
def test_small_cones_unstable(p, q):
    v = classify_stability(MinimalCone.product(p, q), product_link_spectrum(p, q, 3))
    assert v.classification == "unstable"


def test_table_matches_closed_form_law():
    for s in range(2, 13):
        for p in range(1, s // 2 + 1):
            q = s - p
            v = classify_stability(MinimalCone.product(p, q), product_link_spectrum(p, q, 4))
            assert v.strictly_stable == closed_form_law(p, q)
            assert v.strictly_stable == (s + 2 >= 8)


@given(st.integers(3, 20), st.floats(-50, 50))
def test_radial_exponents_solve_the_indicial_equation(n, mu):
    if mu < stability_threshold(n):
        with pytest.raises(InputError):
            radial_exponents(n, mu)
        return
    for g in radial_exponents(n, mu):
        assert g * (g + n - 2) == pytest.approx(mu, abs=1e-7 * (1 + abs(mu)))


def test_meshed_clifford_torus():
    link = MeshedLink(clifford_torus(32), 2.0)
    spec = meshed_link_spectrum(link, 5)
    assert abs(spec.mu1 + 2.0) < 1e-2
    exact = product_link_spectrum(1, 1, 5).eigenvalues
    assert np.allclose(spec.eigenvalues, exact, atol=5e-2)
    assert classify_stability(MinimalCone(4, link), spec).classification == "unstable"


def test_cone_spec_parsing():
    c = cone_from_dict({"ambient_dim": 8, "link": {"p": 3, "q": 3},
                        "strictly_minimising": True, "citation": "classical"})
    assert c.n == 7
    with pytest.raises(InputError):
        cone_from_dict({"p": 3})
    with pytest.raises(InputError):
        cone_from_dict({"p": 3, "q": 3, "strictly_minimising": True})
    with pytest.raises(InputError):
        MinimalCone(9, c.link)
