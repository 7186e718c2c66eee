import numpy as np
import pytest

from nonlocal_lp import bernstein as bern
from nonlocal_lp.fieldops import GridSpec
from nonlocal_lp.kernel import (OperatorSpec, constant_coefficient, drift_vector,
                                random_coefficient, stable_kernel, subordinate_kernel)
from nonlocal_lp.symbol import (CertificateError, SymbolTable, check_symbol_kernel_bound,
                                full_symbol, psi)

XI = np.array([0.1, 0.5, 1.0, 2.0, 4.0, 20.0])


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
def test_stable_symbol_is_power(d, alpha):
    vals = psi(stable_kernel(d, alpha), XI, d=d)
    assert np.allclose(vals, XI ** alpha, rtol=1e-8)


@pytest.mark.parametrize("phi", [bern.powers([0.3, 0.6]), bern.logcosh(0.5)],
                         ids=lambda p: p.name)
def test_subordinate_symbol_is_phi_of_square(phi):
    k = subordinate_kernel(phi, 1)
    assert np.allclose(psi(k, XI), phi(XI ** 2), rtol=1e-5)


def test_psi_accepts_vectors():
    k = stable_kernel(2, 1.2)
    v = np.array([[3.0, 4.0], [0.0, 1.0]])
    assert np.allclose(psi(k, v, vectors=True), np.array([5.0, 1.0]) ** 1.2)


GRID = GridSpec(1, 128, 32.0)


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_constant_coefficient_table(alpha):
    spec = OperatorSpec(stable_kernel(1, alpha), constant_coefficient(1, 2.0))
    t = full_symbol(spec, GRID)
    xi = np.abs(GRID.freq_axis())
    assert np.allclose(t.values, -2.0 * xi ** alpha, atol=1e-10 * xi.max() ** alpha)
    assert t.invariants()["ok"]


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_ltilde_minus_l_is_drift(alpha):
    spec = OperatorSpec(stable_kernel(1, alpha), random_coefficient(1, 0.5, 2.0, 5))
    m = full_symbol(spec, GRID).values
    mt = full_symbol(spec.with_variant("Ltilde"), GRID).values
    b = drift_vector(spec)[0]
    xi = GRID.freq_axis()
    assert np.allclose(mt - m, 1j * b * xi, atol=1e-9 * np.abs(m).max())


def test_adjoint_is_conjugate():
    spec = OperatorSpec(stable_kernel(1, 0.7), random_coefficient(1, 0.5, 2.0, 6))
    m = full_symbol(spec, GRID).values
    ms = full_symbol(spec.with_variant("Lstar"), GRID).values
    assert np.allclose(ms, np.conj(m), atol=1e-12 * np.abs(m).max())


def test_random_table_invariants():
    spec = OperatorSpec(stable_kernel(2, 0.8), random_coefficient(2, 0.5, 2.0, 1))
    t = full_symbol(spec, GridSpec(2, 16, 8.0))
    inv = t.invariants(tol=1e-8)
    assert inv["ok"], inv


def test_sigma_one_needs_cancellation():
    spec = OperatorSpec(stable_kernel(1, 1.0), random_coefficient(1, 0.5, 2.0, 2))
    with pytest.raises(CertificateError, match="CANCEL"):
        full_symbol(spec, GRID)


def test_hermitian_mirror():
    g = GridSpec(1, 8, 8.0)
    t = SymbolTable(g, np.arange(8) * 1j)
    h = t.hermitian()
    mirror = np.roll(np.flip(h), 1)
    assert np.allclose(h, np.conj(mirror))


def test_symbol_kernel_bound_stable():
    cert = check_symbol_kernel_bound(stable_kernel(1, 0.5))
    assert cert.verdict == "pass"
    assert 0 < cert.constants["inf_ratio"] <= cert.constants["sup_ratio"] < np.inf
