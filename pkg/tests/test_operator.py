import warnings

import numpy as np
import pytest

from nonlocal_lp import bernstein as bern
from nonlocal_lp.fieldops import GridFunction, GridSpec, band_limited_field, lp_norm
from nonlocal_lp.kernel import (OperatorSpec, constant_coefficient, random_coefficient,
                                stable_kernel, subordinate_kernel)
from nonlocal_lp.operator import BandLimitWarning, apply_direct, apply_spectral, inner_product
from nonlocal_lp.symbol import full_symbol

GRID = GridSpec(1, 256, 32.0)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_direct_on_cosine_mode(alpha):
    k = 2 * np.pi * 3 / GRID.box
    u = GridFunction.from_function(GRID, lambda x: np.cos(k * x))
    spec = OperatorSpec(stable_kernel(1, alpha), constant_coefficient(1))
    out = apply_direct(spec, u)
    assert np.allclose(out.values, -k ** alpha * u.values, atol=1e-10)


@pytest.mark.parametrize("kernel", [stable_kernel(1, 0.5), stable_kernel(1, 1.5),
                                    subordinate_kernel(bern.powers([0.5]), 1)],
                         ids=["stable0.5", "stable1.5", "powers0.5"])
@pytest.mark.parametrize("variant", ["L", "Ltilde"])
def test_pathways_agree_1d(kernel, variant):
    even = kernel.sigma == 1.0
    coef = random_coefficient(1, 0.5, 2.0, 3, even_inside=even, even_outside=even)
    spec = OperatorSpec(kernel, coef, variant)
    u = band_limited_field(GRID, np.random.default_rng(1))
    s = apply_spectral(full_symbol(spec, GRID), u)
    d = apply_direct(spec, u)
    assert lp_norm(d - s, 2) <= 1e-8 * lp_norm(s, 2)


def test_pathways_agree_2d():
    g = GridSpec(2, 32, 16.0)
    spec = OperatorSpec(stable_kernel(2, 1.5), random_coefficient(2, 0.5, 2.0, 4))
    u = band_limited_field(g, np.random.default_rng(2), max_mode=3)
    s = apply_spectral(full_symbol(spec, g), u)
    d, info = apply_direct(spec, u, return_info=True)
    assert lp_norm(d - s, 2) <= 1e-3 * lp_norm(s, 2)
    assert info["far_zone"]


def test_band_limit_warning():
    u = GridFunction(GRID, np.random.default_rng(0).standard_normal(GRID.n))
    spec = OperatorSpec(stable_kernel(1, 0.5), constant_coefficient(1))
    with pytest.warns(BandLimitWarning):
        apply_direct(spec, u)


def test_adjoint_duality():
    spec = OperatorSpec(stable_kernel(1, 0.7), random_coefficient(1, 0.5, 2.0, 9))
    rng = np.random.default_rng(5)
    u, v = band_limited_field(GRID, rng), band_limited_field(GRID, rng)
    Lu = apply_spectral(full_symbol(spec, GRID), u)
    Lsv = apply_spectral(full_symbol(spec.with_variant("Lstar"), GRID), v)
    assert inner_product(Lu, v) == pytest.approx(inner_product(u, Lsv), rel=1e-12)


def test_constant_is_annihilated():
    spec = OperatorSpec(stable_kernel(1, 1.5), random_coefficient(1, 0.5, 2.0, 2))
    u = GridFunction(GRID, np.ones(GRID.n))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        out = apply_direct(spec, u)
    assert np.max(np.abs(out.values)) < 1e-10
