import numpy as np
import pytest

from nonlocal_lp.fieldops import GridSpec
from nonlocal_lp.kernel import OperatorSpec, random_coefficient, stable_kernel
from nonlocal_lp.symbol import CertificateError
from nonlocal_lp.verify import (SUITES, BumpField, VerificationReport, holder_scaling_check,
                                random_bumps, require, verify_L2, verify_resolvent_bound)


def test_compact_bump_support():
    b = BumpField(np.array([[0.0]]), np.array([1.0]), np.array([2.0]), "compact")
    x = np.array([[0.0], [0.5], [0.999], [1.0], [3.0]])
    v = b(x)
    assert v[0] == pytest.approx(2.0)
    assert 0 < v[2] < 1e-100 or v[2] == 0
    assert v[3] == 0 and v[4] == 0


def test_random_bumps_sign_and_distance():
    rng = np.random.default_rng(0)
    for _ in range(20):
        b = random_bumps(2, rng, (0.1, 0.3), 2.0, sign=-1, min_distance=1.0)
        assert np.all(b.amps <= 0)
        assert np.all(np.linalg.norm(b.centers, axis=1) >= 1.0 + 4 * b.widths - 1e-12)


def test_report_rows_and_dict():
    rep = VerificationReport("x", {"a": 1}, [{"lhs": 1.0, "rhs": 2.0, "ratio": 0.5},
                                             {"lhs": 1.0, "rhs": 1.0, "ratio": 1.0, "p": 2}])
    header, rows = rep.csv_rows()
    assert header == ["lhs", "rhs", "ratio", "p"]
    assert rows[0][-1] == ""
    assert rep.to_dict()["estimate"] == "x"
    assert not rep.passed


def test_require_names_failing_hypothesis():
    spec = OperatorSpec(stable_kernel(1, 0.5), random_coefficient(1, 0.5, 2.0, 1, n_sectors=2))
    with pytest.raises(CertificateError, match="H3"):
        require(spec, {"H1", "H2", "H3"})
    assert set(require(spec, {"H1", "H2"})) == {"H1", "H2"}


def test_resolvent_suite_small():
    rep = verify_resolvent_bound(trials=4, grid=GridSpec(1, 128, 32.0))
    assert rep.passed and rep.worst_ratio <= 1.05
    assert len(rep.trials) == 4 * 3 * 3 * 2


def test_L2_suite_small_2d():
    rep = verify_L2(trials=3, grid=GridSpec(2, 16, 8.0))
    assert rep.passed


def test_suites_are_deterministic():
    a = verify_resolvent_bound(trials=2, grid=GridSpec(1, 64, 16.0), seed=3)
    b = verify_resolvent_bound(trials=2, grid=GridSpec(1, 64, 16.0), seed=3)
    assert a.to_dict() == b.to_dict()


def test_suite_registry():
    assert set(SUITES) == {"resolvent-bound", "L2", "Lp", "positivity", "holder",
                           "sharp-oscillation", "operator-continuity"}


@pytest.mark.parametrize("alpha", [0.5, 1.5])
def test_holder_ratio_is_scale_invariant(alpha):
    pairs = holder_scaling_check(stable_kernel(1, alpha), n=256, trials=3)
    for a, b in pairs:
        assert a == pytest.approx(b, rel=1e-6)
