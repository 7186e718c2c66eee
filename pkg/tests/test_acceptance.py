"""Acceptance suite: one pass/fail line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are repeated in
the terminal summary) or ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
import warnings

import numpy as np
import pytest

from nonlocal_lp import bernstein as bern
from nonlocal_lp.fieldops import (GridSpec, band_limited_field, cone_convexity_check, eta_rule,
                                  lp_norm)
from nonlocal_lp.hypothesis import check_H1, check_H2
from nonlocal_lp.kernel import (OperatorSpec, constant_coefficient, custom_kernel,
                                random_coefficient, stable_kernel, subordinate_kernel)
from nonlocal_lp.operator import apply_direct, apply_spectral
from nonlocal_lp.solver import feynman_kac_mc, resolvent_solve, semigroup_solve
from nonlocal_lp.symbol import full_symbol, psi
from nonlocal_lp.verify import (BumpField, verify_holder, verify_L2, verify_Lp,
                                verify_operator_continuity, verify_positivity_max_principle,
                                verify_resolvent_bound, verify_sharp_oscillation)

# tolerances
PSI_TOL = 1e-3
PSI_SECONDS = 60.0
PATHWAY_TOL = 1e-3
RESOLVENT_SLACK = 1.05
RESOLVENT_SECONDS = 180.0
L2_SLACK = 1.05
POSITIVITY_TOL = 1e-8
KAPPA1_TOL = 0.02
ALPHA0_TOL = 0.02
KAPPA2_TOL = 0.02
MC_SIGMAS = 3.0
MC_SECONDS = 120.0
SEMIGROUP_TOL = 1e-4
CONE_TOL = 1e-6
REFINE_FACTOR = 2.0
LAMBDA_SPREAD = 1.5

GRID_1D = GridSpec(1, 512, 64.0)


def _acceptance_kernels():
    return [stable_kernel(1, 0.5), stable_kernel(1, 1.5),
            subordinate_kernel(bern.powers([0.5]), 1)]


def _random_a(kernel, seed):
    even = kernel.sigma is not None and abs(kernel.sigma - 1.0) < 1e-12
    return random_coefficient(1, 0.5, 2.0, seed, even_inside=even, even_outside=even)


# ---------------------------------------------------------------------------

def test_criterion_1_stable_symbol(criterion):
    t0 = time.perf_counter()
    xi = np.array([0.5, 1.0, 2.0, 4.0])
    worst = 0.0
    for alpha in (0.5, 1.0, 1.5):
        vals = psi(stable_kernel(1, alpha), xi)
        worst = max(worst, float(np.max(np.abs(vals / xi ** alpha - 1))))
    dt = time.perf_counter() - t0
    ok = worst <= PSI_TOL and dt < PSI_SECONDS
    assert criterion(1, ok, f"max |Psi/|xi|^a - 1| = {worst:.2e} (tol {PSI_TOL:g}), {dt:.2f} s")


def test_criterion_2_pathway_agreement(criterion):
    worst = 0.0
    rng = np.random.default_rng(2)
    for kernel in _acceptance_kernels():
        for coef in (constant_coefficient(1), _random_a(kernel, 7)):
            spec = OperatorSpec(kernel, coef, "L")
            table = full_symbol(spec, GRID_1D)
            for _ in range(10):
                u = band_limited_field(GRID_1D, rng)
                s = apply_spectral(table, u)
                with warnings.catch_warnings():
                    warnings.simplefilter("error")
                    dr = apply_direct(spec, u)
                worst = max(worst, lp_norm(dr - s, 2) / lp_norm(s, 2))
    ok = worst <= PATHWAY_TOL
    assert criterion(2, ok, f"max rel. L2 difference direct vs spectral = {worst:.2e} "
                            f"(tol {PATHWAY_TOL:g}) over 60 fields")


def test_criterion_3_resolvent_bound(criterion):
    t0 = time.perf_counter()
    rep = verify_resolvent_bound(trials=50, ps=(1.5, 2.0, 3.0), lams=(0.5, 1.0, 4.0),
                                 variants=("L", "Ltilde"), slack=RESOLVENT_SLACK - 1)
    dt = time.perf_counter() - t0
    worst = max(t["ratio"] for t in rep.trials)
    ok = rep.passed and worst <= RESOLVENT_SLACK and dt < RESOLVENT_SECONDS
    assert criterion(3, ok, f"worst lambda||u||_p/||f||_p = {worst:.4f} "
                            f"(bound {RESOLVENT_SLACK}), {len(rep.trials)} records, {dt:.1f} s")


def test_criterion_4_L2_constants(criterion):
    rep = verify_L2(trials=50, nu=0.5, Lambda=2.0, slack=L2_SLACK - 1)
    ok = rep.passed and rep.worst_ratio <= L2_SLACK
    assert criterion(4, ok, f"worst ratio to (sqrt2/nu, sqrt2) bounds = {rep.worst_ratio:.4f} "
                            f"(bound {L2_SLACK})")


def test_criterion_5_positivity(criterion):
    rep = verify_positivity_max_principle(trials=20, tol=POSITIVITY_TOL)
    sigmas = sorted({t["sigma"] for t in rep.trials})
    min_u = min(t["min_u"] for t in rep.trials)
    ok = rep.passed and len(sigmas) == 3
    assert criterion(5, ok, f"min u over f <= 0 trials = {min_u:.3e}, sigmas {sigmas}")


def test_criterion_6_hypothesis_certifiers(criterion):
    details, ok = [], True
    for alpha in (0.5, 1.0, 1.5):
        k = stable_kernel(1, alpha)
        h1 = check_H1(k)
        h2 = check_H2(k)
        m = 1 if alpha < 1 else 2
        # |S^0| int_0^1 r^(m - 1 - alpha) dr
        kappa2_exact = 2.0 / (m - alpha)
        k1, a0, k2 = h1.constants["kappa1"], h1.constants["alpha0"], h2.constants["kappa2"]
        good = (h1.passed and h2.passed and abs(k1 - 1) <= KAPPA1_TOL
                and abs(a0 - alpha) <= ALPHA0_TOL
                and abs(k2 / kappa2_exact - 1) <= KAPPA2_TOL)
        ok = ok and good
        details.append(f"a={alpha}: k1={k1:.4f} a0={a0:.4f} k2={k2:.4f}/{kappa2_exact:.4f}")
    exp_tail = custom_kernel(1, lambda r: r ** -2.0 * np.exp(-r),
                             lambda r: -2.0 * np.log(r) - r, None, "exp_tail")
    h2e = check_H2(exp_tail)
    ok = ok and not h2e.passed
    details.append(f"exp tail H2 {h2e.verdict}")
    assert criterion(6, ok, "; ".join(details))


def test_criterion_7_monte_carlo(criterion):
    t0 = time.perf_counter()
    f_field = BumpField(np.array([[0.0]]), np.array([1.0]), np.array([1.0]))
    f = f_field.on(GRID_1D)
    table = full_symbol(OperatorSpec(stable_kernel(1, 1.0), constant_coefficient(1), "L"),
                        GRID_1D)
    u = resolvent_solve(table, f, 1.0).u
    idx = np.array([224, 240, 256, 264, 288])
    pts = GRID_1D.axis()[idx][:, None]
    mc = feynman_kac_mc(1.0, 1, f_field, 1.0, pts, paths=100_000, seed=7, period=GRID_1D.box)
    z = np.abs(mc.diagnostics["estimate"] - u.values[idx]) / mc.diagnostics["stderr"]
    dt = time.perf_counter() - t0
    ok = bool(np.all(z <= MC_SIGMAS)) and dt < MC_SECONDS
    assert criterion(7, ok, f"max |u_MC - u_spectral|/stderr = {np.max(z):.2f} "
                            f"(tol {MC_SIGMAS}), {dt:.1f} s")


def test_criterion_8_semigroup(criterion):
    worst = 0.0
    rng = np.random.default_rng(8)
    for kernel in _acceptance_kernels():
        spec = OperatorSpec(kernel, _random_a(kernel, 3), "Ltilde")
        lt = full_symbol(spec, GRID_1D)
        phi = full_symbol(spec.with_variant("Phi"), GRID_1D)
        for lam in (0.5, 1.0, 4.0):
            f = band_limited_field(GRID_1D, rng)
            a = resolvent_solve(lt, f, lam).u
            b = semigroup_solve(phi, f, lam).u
            worst = max(worst, lp_norm(a - b, 2) / lp_norm(a, 2))
    ok = worst <= SEMIGROUP_TOL
    assert criterion(8, ok, f"max rel. L2 semigroup vs resolvent = {worst:.2e} "
                            f"(tol {SEMIGROUP_TOL:g})")


def _cone_draw(rng):
    while True:
        alpha = rng.uniform(0.05, 0.95)
        e1, e2 = rng.uniform(0.005, 0.245, size=2)
        if eta_rule(alpha, e1, e2) <= 0:
            break
    d = int(rng.integers(1, 4))
    b = rng.standard_normal(d) * rng.uniform(0.2, 5.0)
    # piecewise constant K >= 0 on radial cells
    edges = np.sort(rng.uniform(0, e1 * np.linalg.norm(b), size=3))
    vals = rng.uniform(0, 3, size=4)

    def K(z):
        return vals[np.searchsorted(edges, np.linalg.norm(z, axis=-1))]

    return alpha, b, K, e1, e2


def test_criterion_9_cone_convexity(criterion):
    rng = np.random.default_rng(9)
    held, worst_gap = 0, np.inf
    for _ in range(100):
        alpha, b, K, e1, e2 = _cone_draw(rng)
        r = cone_convexity_check(alpha, b, K, e1, e2, tol=CONE_TOL)
        held += r["holds"]
        worst_gap = min(worst_gap, r["gap"] / max(abs(r["rhs"]), 1e-300))
    ok = held == 100
    assert criterion(9, ok, f"{held}/100 admissible draws hold; "
                            f"min relative gap (rhs - lhs)/|rhs| = {worst_gap:.3e}")


def test_criterion_10_monitored_constants(criterion):
    reports = {
        "Lp": verify_Lp(),
        "holder": verify_holder(),
        "sharp-oscillation": verify_sharp_oscillation(),
        "operator-continuity": verify_operator_continuity(),
    }
    parts, ok = [], True
    for name, rep in reports.items():
        ref = rep.refinement
        good = rep.passed and np.isfinite(rep.worst_ratio) and ref["stable"] \
            and 1 / REFINE_FACTOR <= ref["factor"] <= REFINE_FACTOR
        text = f"{name} N={rep.worst_ratio:.3g} x{ref['factor']:.3f}"
        if name == "Lp":
            spread = rep.constants["lambda_spread"]
            good = good and spread <= LAMBDA_SPREAD
            text += f" lambda-spread {spread:.3f}"
        ok = ok and good
        parts.append(text)
    assert criterion(10, ok, "; ".join(parts))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
