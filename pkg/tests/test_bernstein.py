import numpy as np
import pytest
from scipy.integrate import quad

from nonlocal_lp import bernstein as bern

ENTRIES = [
    bern.powers([0.5]),
    bern.powers([0.3, 0.7]),
    bern.power_mix(0.5, 0.5),
    bern.log_up(0.5, 0.3),
    bern.log_down(0.5, 0.3),
    bern.logcosh(0.5),
    bern.logsinh(0.5),
]


@pytest.mark.parametrize("phi", ENTRIES, ids=lambda p: p.name)
def test_bernstein_shape(phi):
    lam = np.geomspace(1e-6, 1e6, 200)
    v = phi(lam)
    assert np.all(v > 0)
    assert np.all(np.diff(v) > 0)
    small = phi(np.array([1e-40, 1.0]))
    assert small[0] < 0.1 * small[1]
    # phi(lam) / lam is non-increasing for Bernstein functions without drift
    assert np.all(np.diff(v / lam) <= 1e-12 * (v / lam)[:-1])


def test_powers_matches_its_levy_density():
    phi = bern.powers([0.5])
    for lam in (0.1, 1.0, 7.0):
        val = quad(lambda t: (1 - np.exp(-lam * t)) * phi.levy_density(t), 0, 1, limit=200)[0] \
            + quad(lambda t: (1 - np.exp(-lam * t)) * phi.levy_density(t), 1, np.inf, limit=200)[0]
        assert val == pytest.approx(float(phi(np.array([lam]))[0]), rel=1e-7)


def test_from_config_round_trip():
    phi = bern.from_config("power_mix", {"alpha": 0.3, "beta": 0.6})
    assert phi.key == bern.power_mix(0.3, 0.6).key


def test_from_config_rejects_unknown():
    with pytest.raises(ValueError):
        bern.from_config("nope", {})
    with pytest.raises(ValueError):
        bern.from_config("powers", {})


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.5])
def test_parameter_range(alpha):
    with pytest.raises(ValueError):
        bern.powers([alpha])
