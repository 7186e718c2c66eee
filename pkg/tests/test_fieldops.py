import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_lp.fieldops import (GridFunction, GridSpec, ball_average, band_limited_field,
                                  cone_convexity_check, dft, eta_rule, holder_seminorm, idft,
                                  lp_norm, maximal_function, mean_oscillation, osc,
                                  sharp_function, top_octave_fraction, weighted_l1_norm)
from nonlocal_lp.kernel import stable_kernel


@pytest.mark.parametrize("n", [0, 6, 12, 100])
def test_grid_requires_power_of_two(n):
    with pytest.raises(ValueError):
        GridSpec(1, n, 1.0)


def test_grid_rejects_dimension():
    with pytest.raises(ValueError):
        GridSpec(4, 8, 1.0)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([1, 2, 3]), st.sampled_from([8, 16]), st.floats(0.5, 50.0),
       st.integers(0, 2 ** 31))
def test_parseval_and_inverse(d, n, box, seed):
    g = GridSpec(d, n, box)
    u = GridFunction(g, np.random.default_rng(seed).standard_normal(g.shape))
    s = dft(u)
    assert np.sum(np.abs(s) ** 2) / box ** d == pytest.approx(lp_norm(u, 2) ** 2, rel=1e-10)
    assert np.allclose(idft(s, g).values, u.values, atol=1e-12)


def test_dft_of_cosine_matches_continuous_transform():
    g = GridSpec(1, 64, 2 * np.pi)
    u = GridFunction.from_function(g, lambda x: np.cos(3 * x))
    s = dft(u)
    k = np.round(g.freq_axis()).astype(int)
    assert abs(s[k == 3][0] - np.pi) < 1e-12
    assert np.allclose(np.abs(s[np.abs(k) != 3]), 0.0, atol=1e-12)


def test_idft_rejects_non_hermitian():
    g = GridSpec(1, 8, 1.0)
    s = np.zeros(8, dtype=complex)
    s[1] = 1.0
    with pytest.raises(ValueError):
        idft(s, g)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0, np.inf])
def test_lp_norm_of_constant(p):
    g = GridSpec(2, 16, 4.0)
    u = GridFunction(g, np.full(g.shape, -3.0))
    expected = 3.0 if np.isinf(p) else 3.0 * 16.0 ** (1 / p)
    assert lp_norm(u, p) == pytest.approx(expected)


def test_lp_norm_rejects_small_p():
    g = GridSpec(1, 8, 1.0)
    with pytest.raises(ValueError):
        lp_norm(GridFunction(g, np.ones(8)), 0.5)


def test_band_limited_field_has_no_top_octave():
    g = GridSpec(2, 32, 8.0)
    u = band_limited_field(g, np.random.default_rng(0))
    assert top_octave_fraction(u) < 1e-25


def test_weighted_l1_of_delta():
    g = GridSpec(1, 64, 16.0)
    k = stable_kernel(1, 1.0)
    v = np.zeros(64)
    v[32 + 8] = 1.0  # x = 2
    w = 1.0 / (1.0 / float(k(1.0)) + 1.0 / float(k(1.0)))
    assert weighted_l1_norm(GridFunction(g, v), 1.0, k) == pytest.approx(w * g.h)


def test_ball_functionals():
    g = GridSpec(1, 64, 16.0)
    u = GridFunction.from_function(g, lambda x: x)
    assert ball_average(u, [0.0], 2.0) == pytest.approx(0.0, abs=1e-12)
    assert osc(u, [0.0], 2.0) == pytest.approx(4.0)
    assert mean_oscillation(u, [1.0], 1.0) == pytest.approx(np.mean(np.abs(np.arange(-4, 5))) * g.h)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_maximal_and_sharp_bounds(seed):
    g = GridSpec(1, 64, 8.0)
    rng = np.random.default_rng(seed)
    u = GridFunction(g, rng.standard_normal(64))
    x = g.axis()[int(rng.integers(64))]
    M = maximal_function(u, [x], radii="all")
    assert M >= np.mean(np.abs(u.values[np.abs(g.axis() - x) <= g.h * (1 + 1e-12)])) - 1e-12
    assert sharp_function(u, [x], radii="all") <= 2 * M + 1e-12
    assert M >= maximal_function(u, [x])


def test_holder_seminorm_of_linear_function():
    g = GridSpec(1, 64, 8.0)
    u = GridFunction.from_function(g, lambda x: 2 * x)
    # sup |2 (x - y)| / |x - y|^a over |x - y| <= 2 R is attained at the diameter
    val = holder_seminorm(u, 0.5, [0.0], 1.0)
    assert val == pytest.approx(2 * 2.0 ** 0.5, rel=1e-12)


def test_cone_convexity_constant_kernel():
    for d, b in [(1, [1.0]), (2, [1.0, 0.5]), (3, [0.2, 0.3, 1.0])]:
        r = cone_convexity_check(0.5, np.array(b), 1.0, 0.005, 0.005)
        assert r["holds"] and r["lhs"] < 0


def test_cone_convexity_rejects_bad_eta():
    assert eta_rule(0.5, 0.005, 0.005) <= 0 < eta_rule(0.5, 0.2, 0.2)
    with pytest.raises(ValueError):
        cone_convexity_check(0.5, np.array([1.0]), 1.0, 0.3, 0.1)
    with pytest.raises(ValueError):
        cone_convexity_check(1.5, np.array([1.0]), 1.0, 0.005, 0.005)
