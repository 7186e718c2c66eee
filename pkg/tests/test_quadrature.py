import numpy as np
import pytest
from scipy.special import gamma

from nonlocal_lp.quadrature import gauss_legendre, panel_nodes, sphere_area, sphere_rule


@pytest.mark.parametrize("order", [4, 8, 16])
def test_gauss_legendre_exact_for_polynomials(order):
    x, w = gauss_legendre(order)
    for k in range(2 * order):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert np.dot(w, x ** k) == pytest.approx(exact, abs=1e-13)


def test_panel_nodes_integrate_on_breaks():
    r, w = panel_nodes(np.geomspace(1e-6, 10.0, 30))
    assert np.sum(w * np.exp(-r)) == pytest.approx(np.exp(-1e-6) - np.exp(-10.0), rel=1e-13)


@pytest.mark.parametrize("d,area", [(1, 2.0), (2, 2 * np.pi), (3, 4 * np.pi)])
def test_sphere_area(d, area):
    assert sphere_area(d) == pytest.approx(area, rel=1e-15)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_sphere_rule_moments(d):
    dirs, w = sphere_rule(d)
    assert np.allclose(np.linalg.norm(dirs, axis=1), 1.0)
    assert w.sum() == pytest.approx(sphere_area(d), rel=1e-12)
    # int theta_1^2 = |S| / d and int theta_1^4 = 3 |S| / (d (d + 2))
    assert np.dot(w, dirs[:, 0] ** 2) == pytest.approx(sphere_area(d) / d, rel=1e-10)
    assert np.dot(w, dirs[:, 0] ** 4) == pytest.approx(3 * sphere_area(d) / (d * (d + 2)),
                                                       rel=1e-10)
    assert np.allclose(w @ dirs, 0.0, atol=1e-12)


def test_sphere_area_matches_gamma_formula():
    for d in (1, 2, 3):
        assert sphere_area(d) == pytest.approx(2 * np.pi ** (d / 2) / gamma(d / 2))
