import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma

from nonlocal_lp import bernstein as bern
from nonlocal_lp.kernel import (OperatorSpec, coefficient_from_config, constant_coefficient,
                                drift_vector, kernel_from_config, random_coefficient,
                                stable_kernel, subordinate_kernel)


def stable_constant(d, alpha):
    return alpha * 2 ** (alpha - 1) * gamma((d + alpha) / 2) / (np.pi ** (d / 2)
                                                                 * gamma(1 - alpha / 2))


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.3, 1.0, 1.7])
def test_stable_normalisation_closed_form(d, alpha):
    k = stable_kernel(d, alpha)
    assert float(k(1.0)) == pytest.approx(stable_constant(d, alpha), rel=1e-12)
    assert float(k(2.0)) == pytest.approx(stable_constant(d, alpha) * 2.0 ** (-d - alpha),
                                          rel=1e-12)


@pytest.mark.parametrize("d", [1, 3])
def test_subordinate_power_is_stable(d):
    # Brownian motion subordinated by lam^(a/2) is the rotationally symmetric a-stable process
    alpha = 1.2
    sub = subordinate_kernel(bern.powers([alpha / 2]), d)
    ref = stable_kernel(d, alpha)
    r = np.geomspace(1e-3, 1e3, 25)
    assert np.allclose(sub(r), ref(r), rtol=1e-5)


def test_kernel_from_config():
    assert kernel_from_config({"family": "stable", "alpha": 0.5}, 1).alpha == 0.5
    sub = kernel_from_config({"family": "subordinate", "phi": "powers", "alphas": [0.5]}, 1)
    assert sub.sigma == pytest.approx(1.0)
    tail = kernel_from_config({"family": "exp_tail"}, 2)
    assert float(tail(1.0)) == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        kernel_from_config({"family": "nope"}, 1)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(0.1, 1.0), st.floats(1.0, 5.0),
       st.integers(1, 3))
def test_random_coefficient_bounds(seed, nu, Lambda, d):
    a = random_coefficient(d, nu, Lambda, seed)
    y = np.random.default_rng(seed).standard_normal((200, d)) * 5
    v = a(y)
    assert np.all(v >= nu) and np.all(v <= Lambda)
    assert np.allclose(a.reflected()(y), a(-y))


@pytest.mark.parametrize("d", [1, 2, 3])
def test_even_flags(d):
    a = random_coefficient(d, 0.5, 2.0, 4, even_inside=True, even_outside=False)
    rng = np.random.default_rng(0)
    dirs = rng.standard_normal((50, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    inner = dirs * 0.3
    assert np.allclose(a(inner), a(-inner))


def test_coefficient_validation():
    with pytest.raises(ValueError):
        random_coefficient(1, 2.0, 1.0, 0)
    c = coefficient_from_config({"family": "constant", "value": 2.0}, 2)
    assert c.is_constant and c.nu == 2.0


def test_operator_spec_regimes():
    k05, k1, k15 = (stable_kernel(1, a) for a in (0.5, 1.0, 1.5))
    a = constant_coefficient(1)
    assert OperatorSpec(k05, a).compensator_radius == 0.0
    assert OperatorSpec(k1, a).compensator_radius == 1.0
    assert np.isinf(OperatorSpec(k15, a).compensator_radius)
    assert OperatorSpec(k15, a, "Ltilde").compensator_radius == 1.0
    assert OperatorSpec(k15, a, "L-tilde").variant == "Ltilde"
    with pytest.raises(ValueError):
        OperatorSpec(k15, a, "bogus")


def test_drift_vanishes_for_even_coefficient():
    k = stable_kernel(2, 0.5)
    spec = OperatorSpec(k, random_coefficient(2, 0.5, 2.0, 1, even_inside=True,
                                              even_outside=True))
    assert np.allclose(drift_vector(spec), 0.0)


def test_drift_one_dimensional_closed_form():
    # a = a_+ on y > 0 and a_- on y < 0 inside the unit ball: b = -(a_+ - a_-) c / (1 - alpha)
    alpha = 0.5
    k = stable_kernel(1, alpha)
    a = random_coefficient(1, 0.5, 2.0, 11, n_sectors=2)
    spec = OperatorSpec(k, a)
    c = float(k(1.0))
    edges = np.array(a.edges)
    b = 0.0
    for s, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        if lo >= 1.0:
            break
        plus = float(a(np.array([[0.5 * (lo + hi)]]))[0])
        minus = float(a(np.array([[-0.5 * (lo + hi)]]))[0])
        b -= (plus - minus) * c * (hi ** (1 - alpha) - lo ** (1 - alpha)) / (1 - alpha)
    assert drift_vector(spec)[0] == pytest.approx(b, rel=1e-8)


def test_drift_undefined_at_sigma_one():
    with pytest.raises(ValueError):
        drift_vector(OperatorSpec(stable_kernel(1, 1.0), constant_coefficient(1)))
