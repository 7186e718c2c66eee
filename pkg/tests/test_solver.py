import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nonlocal_lp.fieldops import GridFunction, GridSpec, band_limited_field, lp_norm
from nonlocal_lp.kernel import OperatorSpec, constant_coefficient, random_coefficient, stable_kernel
from nonlocal_lp.solver import (MIN_PATHS, feynman_kac_mc, resolvent_solve, sample_stable,
                                semigroup_solve)
from nonlocal_lp.symbol import full_symbol

GRID = GridSpec(1, 256, 32.0)


def _table(alpha, variant="L", seed=None):
    coef = constant_coefficient(1) if seed is None else random_coefficient(1, 0.5, 2.0, seed)
    return full_symbol(OperatorSpec(stable_kernel(1, alpha), coef, variant), GRID)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 1.9), st.floats(0.1, 10.0), st.integers(1, 20))
def test_single_mode_closed_form(alpha, lam, mode):
    k = 2 * np.pi * mode / GRID.box
    f = GridFunction.from_function(GRID, lambda x: np.cos(k * x))
    u = resolvent_solve(_table(alpha), f, lam)
    assert np.allclose(u.u.values, -f.values / (k ** alpha + lam), atol=1e-12)
    assert u.residual < 1e-12


def test_resolvent_rejects_bad_lambda():
    f = GridFunction(GRID, np.zeros(GRID.n))
    with pytest.raises(ValueError):
        resolvent_solve(_table(0.5), f, 0.0)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
@pytest.mark.parametrize("lam", [0.5, 4.0])
def test_semigroup_matches_resolvent(alpha, lam):
    spec = OperatorSpec(stable_kernel(1, alpha), random_coefficient(1, 0.5, 2.0, 4), "Ltilde")
    f = band_limited_field(GRID, np.random.default_rng(0))
    a = resolvent_solve(full_symbol(spec, GRID), f, lam).u
    res = semigroup_solve(full_symbol(spec.with_variant("Phi"), GRID), f, lam)
    assert lp_norm(a - res.u, 2) <= 1e-10 * lp_norm(a, 2)
    assert res.diagnostics["mode_error"] < 1e-10


def test_laguerre_rule_is_accurate_for_smooth_modes():
    f = band_limited_field(GRID, np.random.default_rng(1), max_mode=4)
    t = _table(0.5)
    a = resolvent_solve(t, f, 1.0).u
    b = semigroup_solve(t, f, 1.0, rule="laguerre", nodes=64).u
    assert lp_norm(a - b, 2) <= 1e-4 * lp_norm(a, 2)


@pytest.mark.parametrize("alpha,d", [(0.7, 1), (1.0, 1), (1.5, 2), (2.0, 3)])
def test_sample_stable_characteristic_function(alpha, d):
    rng = np.random.default_rng(3)
    n = 200_000
    X = sample_stable(alpha, d, np.ones(n), rng)
    for xi in (0.3, 1.0):
        emp = np.mean(np.cos(xi * X[:, 0]))
        assert emp == pytest.approx(np.exp(-xi ** alpha), abs=5 / np.sqrt(n))


def test_mc_refuses_small_ensembles():
    with pytest.raises(ValueError, match="paths"):
        feynman_kac_mc(1.0, 1, lambda x: x[:, 0], 1.0, [[0.0]], paths=MIN_PATHS - 1)


def test_mc_is_deterministic():
    def f(x):
        return np.exp(-np.sum(x ** 2, axis=1))

    a = feynman_kac_mc(1.2, 2, f, 1.0, [[0.0, 0.0]], paths=5000, seed=4)
    b = feynman_kac_mc(1.2, 2, f, 1.0, [[0.0, 0.0]], paths=5000, seed=4)
    c = feynman_kac_mc(1.2, 2, f, 1.0, [[0.0, 0.0]], paths=5000, seed=5)
    assert a.diagnostics["estimate"][0] == b.diagnostics["estimate"][0]
    assert a.diagnostics["estimate"][0] != c.diagnostics["estimate"][0]


def test_mc_agrees_with_spectral():
    def f(x):
        return np.exp(-0.5 * x[:, 0] ** 2)

    fg = GridFunction.from_function(GRID, lambda x: np.exp(-0.5 * x ** 2))
    u = resolvent_solve(_table(1.5), fg, 2.0).u
    idx = [128, 136]
    res = feynman_kac_mc(1.5, 1, f, 2.0, GRID.axis()[idx][:, None], paths=40_000, seed=1,
                         period=GRID.box)
    z = np.abs(res.diagnostics["estimate"] - u.values[idx]) / res.diagnostics["stderr"]
    assert np.all(z < 4)
