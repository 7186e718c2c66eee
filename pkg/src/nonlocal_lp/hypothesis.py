"""Numerical certificates for the structural hypotheses on a kernel.

Every check sweeps logarithmic grids (at least 64 points per decade) and
works with ``log j`` so that sweeps over many decades never underflow.
Sweeps cannot prove statements quantified over all reals; a certificate
records the grid it used, and ``inconclusive`` is treated as failure by
downstream consumers.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import logsumexp

from .quadrature import gauss_legendre, panel_nodes, sphere_area, sphere_rule

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
POINTS_PER_DECADE = 64
SLACK = 1.02
ZERO_TOL = 1e-10


@dataclass
class HypothesisCertificate:
    """Verdict and fitted constants of one hypothesis check."""

    hypothesis: str
    verdict: str
    constants: dict = field(default_factory=dict)
    grid: dict = field(default_factory=dict)
    worst_violation: float = 0.0
    notes: str = ""

    @property
    def passed(self):
        return self.verdict == PASS

    def to_dict(self):
        return asdict(self)


def _log_grid(lo, hi, ppd=POINTS_PER_DECADE):
    n = int(round(np.log10(hi / lo) * ppd)) + 1
    return np.geomspace(lo, hi, n)


def _grid_info(lo, hi, ppd=POINTS_PER_DECADE, **extra):
    return dict(r_min=lo, r_max=hi, points_per_decade=ppd, spacing="log", **extra)


def _sigma_of(kernel, sigma):
    if sigma is not None:
        return float(sigma)
    if kernel.sigma is not None:
        return float(kernel.sigma)
    return estimate_sigma(kernel).constants["sigma"]


def _is_one(sigma):
    return abs(sigma - 1.0) <= 1e-12


# ---------------------------------------------------------------------------
# shell sums
# ---------------------------------------------------------------------------

def _log_shell_sums(kernel, power, n_range, inner=True):
    """log of ``|S| int r^(power + d - 1) j(r) dr`` over dyadic shells.

    ``inner`` shells are [2^-(n+1), 2^-n]; outer shells [2^n, 2^(n+1)].
    """
    d = kernel.d
    x, w = gauss_legendre(16)
    n = np.asarray(n_range, dtype=float)
    if inner:
        a, b = 2.0 ** (-n - 1), 2.0 ** (-n)
    else:
        a, b = 2.0 ** n, 2.0 ** (n + 1)
    r = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * x[None, :]
    logw = np.log(0.5 * (b - a))[:, None] + np.log(w)[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = logw + (power + d - 1) * np.log(r) + kernel.log(r)
    return logsumexp(vals, axis=1) + np.log(sphere_area(d))


def _decay_fit(logs, n):
    """Fit ``log s_n = A - c n ln2 - beta ln n``; returns (c, beta, resid, se)."""
    X = np.stack([np.ones_like(n), -n * np.log(2.0), -np.log(n)], axis=1)
    coef, *_ = np.linalg.lstsq(X, logs, rcond=None)
    res = logs - X @ coef
    dof = max(1, n.size - 3)
    s2 = float(res @ res) / dof
    cov = s2 * np.linalg.pinv(X.T @ X)
    return float(coef[1]), float(coef[2]), float(np.max(np.abs(res))), float(np.sqrt(cov[1, 1]))


def _series_converges(logs, n):
    if np.all(np.isneginf(logs[-4:])):
        return True, {"decay_rate": np.inf, "log_power": 0.0}
    if not np.all(np.isfinite(logs)):
        return None, {}
    c, beta, resid, _ = _decay_fit(logs, n)
    ok = c > 1e-3 or (abs(c) <= 1e-3 and beta > 1.0)
    return ok, {"decay_rate": c, "log_power": beta, "fit_residual": resid}


def check_levy(kernel, d=None):
    """Finiteness of ``int (1 ^ |y|^2) J(y) dy`` on radii [1e-8, 1e8].

    The second moment near the origin and the mass of the tail are split
    into dyadic shells; each series passes when its terms decay at a
    geometric (or summable logarithmic) rate.
    """
    d = kernel.d if d is None else d
    n = np.arange(0, 27, dtype=float)
    try:
        inner = _log_shell_sums(kernel, 2.0, n, inner=True)
        outer = _log_shell_sums(kernel, 0.0, n, inner=False)
    except Exception as exc:  # evaluation failure of a user kernel
        return HypothesisCertificate("LEVY", INCONCLUSIVE, grid=_grid_info(1e-8, 1e8),
                                     notes=f"kernel evaluation failed: {exc}")
    ok_in, fit_in = _series_converges(inner[8:], n[8:] + 1)
    ok_out, fit_out = _series_converges(outer[8:], n[8:] + 1)
    consts = {"inner": fit_in, "outer": fit_out}
    if ok_in is None or ok_out is None:
        return HypothesisCertificate("LEVY", INCONCLUSIVE, consts, _grid_info(1e-8, 1e8),
                                     notes="non-finite shell sums")
    verdict = PASS if ok_in and ok_out else FAIL
    if verdict == PASS:
        consts["value"] = float(np.exp(logsumexp(inner)) + np.exp(logsumexp(outer)))
    notes = "" if ok_in else "second moment diverges at the origin"
    if not ok_out:
        notes += ("; " if notes else "") + "tail mass diverges"
    return HypothesisCertificate("LEVY", verdict, consts, _grid_info(1e-8, 1e8, shells="dyadic"),
                                 0.0, notes)


def estimate_sigma(kernel, d=None, depth=(50, 100), tol=1e-6):
    """Order ``sigma = inf{delta: int_{|y|<1} |y|^delta J < inf}``.

    Bisection over delta in (0, 2]: a delta is accepted when the dyadic
    shell sums at depths ``2^-n``, ``n`` in ``depth``, decay. The reported
    uncertainty combines the bisection width with the standard error of the
    fitted decay rate.
    """
    n = np.arange(depth[0], depth[1] + 1, dtype=float)
    base = _log_shell_sums(kernel, 0.0, n, inner=True)
    if not np.all(np.isfinite(base)):
        return HypothesisCertificate("SIGMA", INCONCLUSIVE, grid={"depth": list(depth)},
                                     notes="non-finite shell sums")
    _, _, resid, se = _decay_fit(base, n)
    if resid > 0.1:
        return HypothesisCertificate("SIGMA", INCONCLUSIVE, {"fit_residual": resid},
                                     {"depth": list(depth)}, notes="irregular shell sums")

    def converges(delta):
        # |y|^delta multiplies shell n by 2^(-n delta); fit once, shift the rate
        logs = base - n * delta * np.log(2.0)
        c, beta, _, _ = _decay_fit(logs, n)
        return c > 0 or (c == 0 and beta > 1)

    lo, hi = 0.0, 2.0
    if converges(lo):
        sigma_hat = 0.0
    elif not converges(hi):
        return HypothesisCertificate("SIGMA", FAIL, {"sigma": np.nan}, {"depth": list(depth)},
                                     notes="no delta in (0, 2] gives convergence")
    else:
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if converges(mid):
                hi = mid
            else:
                lo = mid
        sigma_hat = 0.5 * (lo + hi)
    consts = {"sigma": sigma_hat, "uncertainty": tol + se / np.log(2.0)}
    notes = ""
    if kernel.sigma is not None:
        consts["sigma_analytic"] = float(kernel.sigma)
        if abs(kernel.sigma - sigma_hat) > 0.05:
            notes = "estimate disagrees with analytic order by more than 0.05"
    return HypothesisCertificate("SIGMA", PASS, consts,
                                 {"depth": list(depth), "shells": "dyadic", "bisection_tol": tol},
                                 0.0, notes)


# ---------------------------------------------------------------------------
# pairwise scaling sweeps
# ---------------------------------------------------------------------------

def _pair_rates(logr, logj, min_ratio=10.0):
    """Decay rates ``(log j(s) - log j(t)) / log(t/s)`` over pairs t/s >= min_ratio."""
    dl = logr[None, :] - logr[:, None]          # log(t/s), rows s, cols t
    mask = dl >= np.log(min_ratio) - 1e-12
    with np.errstate(invalid="ignore"):
        rates = (logj[:, None] - logj[None, :]) / np.where(mask, dl, 1.0)
    return rates[mask]


def _max_log_ratio(logr, logj, p):
    """``max_{s<=t} [log j(t) - log j(s) + p log(t/s)]``."""
    F = logj + p * logr
    with np.errstate(invalid="ignore"):
        diff = F - np.minimum.accumulate(F)
    return float(np.max(np.where(np.isneginf(F), 0.0, diff)))


def _min_log_ratio(logr, logj, p):
    """``min_{s<=t} [log j(t) - log j(s) + p log(t/s)]``."""
    F = logj + p * logr
    return float(np.min(F - np.maximum.accumulate(F)))


def check_H1(kernel, d=None, sigma=None, r_range=(1e-4, 1e4)):
    """Upper scaling ``j(t) <= kappa1 (s/t)^(d+alpha0) j(s)`` for s <= t.

    ``alpha0`` is the smallest decay rate (minus d) over pairs at least a
    decade apart, capped to 1 when sigma <= 1 and kept below 2 otherwise;
    ``kappa1`` is then the smallest constant valid on every sampled pair.
    """
    d = kernel.d if d is None else d
    sigma = _sigma_of(kernel, sigma)
    r = _log_grid(*r_range)
    logr = np.log(r)
    with np.errstate(divide="ignore"):
        logj = kernel.log(r)
    grid = _grid_info(*r_range)
    if np.any(np.isnan(logj)) or np.any(logj == np.inf):
        return HypothesisCertificate("H1", INCONCLUSIVE, grid=grid, notes="j not evaluable")
    # j = 0 at t satisfies the upper bound trivially; j = 0 at s < t with
    # j(t) > 0 shows up as an infinite violation
    with np.errstate(invalid="ignore"):
        rates = _pair_rates(logr, logj)
    rates = rates[~np.isnan(rates)]
    alpha0 = float(np.min(rates)) - d
    if sigma <= 1.0 + 1e-12:
        alpha0 = min(alpha0, 1.0)
    else:
        alpha0 = min(alpha0, 2.0 - 1e-6)
    if alpha0 <= 0:
        return HypothesisCertificate("H1", FAIL, {"alpha0": alpha0}, grid,
                                     notes="no positive scaling exponent")
    log_k1 = _max_log_ratio(logr, logj, d + alpha0)
    kappa1 = float(np.exp(log_k1))
    consts = {"alpha0": alpha0, "kappa1": kappa1, "sigma": sigma}
    if sigma > 1.0 + 1e-12 and alpha0 <= 1.0:
        return HypothesisCertificate("H1", FAIL, consts, grid, 1.0,
                                     "sigma > 1 requires alpha0 in (1, 2)")
    return HypothesisCertificate("H1", PASS, consts, grid, 1.0)


def _moment_ratios(kernel, t, m, ppd=8, order=16):
    """``|S| int_0^1 r^(m+d-1) j(t r) dr / j(t)`` for each t."""
    d = kernel.d
    breaks = np.geomspace(1e-14, 1.0, int(14 * ppd) + 1)
    r, w = panel_nodes(breaks, order=order)
    logt = np.log(t)[:, None]
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        logv = (np.log(w) + (m + d - 1) * np.log(r))[None, :] \
            + kernel.log(t[:, None] * r[None, :]) - kernel.log(t)[:, None]
        vals = np.exp(logsumexp(logv, axis=1))
        # power-law closure on (0, 1e-14]
        l0 = logv[:, 0] - np.log(w[0])
        l1 = logv[:, 1] - np.log(w[1])
        p = (l1 - l0) / (np.log(r[1]) - np.log(r[0]))
        head = np.where(p > -1, np.exp(l0) * r[0] / (p + 1), np.inf)
    del logt
    return sphere_area(d) * (vals + head)


def check_H2(kernel, d=None, sigma=None, t_range=(1e-3, 1e3)):
    """Moment domination ``int_{|y|<1} |y|^m j(t|y|) dy <= kappa2 j(t)``.

    ``m = 1`` when sigma < 1, ``m = 2`` otherwise. Passes when the supremum
    over the t-grid is finite and changes by at most 5% both when the
    quadrature is refined and when the t-range is extended by a decade
    on each side.
    """
    d = kernel.d if d is None else d
    sigma = _sigma_of(kernel, sigma)
    m = 1 if sigma < 1.0 - 1e-12 else 2
    t = _log_grid(*t_range)
    ratios = _moment_ratios(kernel, t, m)
    kappa2 = float(np.max(ratios))
    refined = float(np.max(_moment_ratios(kernel, t, m, ppd=16)))
    ext = _log_grid(t_range[0] / 10, t_range[1] * 10)
    extended = float(np.max(_moment_ratios(kernel, ext, m)))
    consts = {"kappa2": kappa2, "moment": m, "sigma": sigma,
              "kappa2_refined": refined, "kappa2_extended": extended}
    grid = _grid_info(*t_range, radial_panels_per_decade=8)
    if not all(np.isfinite([kappa2, refined, extended])):
        return HypothesisCertificate("H2", FAIL, consts, grid, np.inf,
                                     "moment ratio unbounded on the grid")
    stable = abs(refined / kappa2 - 1) <= 0.05 and abs(extended / kappa2 - 1) <= 0.05
    if not stable:
        return HypothesisCertificate("H2", FAIL, consts, grid, extended / kappa2,
                                     "supremum not stable under refinement/extension")
    return HypothesisCertificate("H2", PASS, consts, grid, 1.0)


def _angular_asymmetry(coefficient, r, component):
    """``int_S theta_i (a - a ^ a(-.))(r theta) dtheta`` and the |.| mass."""
    d = coefficient.d
    dirs, w = sphere_rule(d, coefficient.n_sectors, total=256)
    pts = r[:, None, None] * dirs[None, :, :]
    a_p = coefficient(pts)
    a_m = coefficient(-pts)
    k2 = a_p - np.minimum(a_p, a_m)
    return k2 @ (w * dirs[:, component]), k2 @ w


def check_H3(kernel, coefficient, d=None, sigma=None, clause="ii"):
    """Drift-control clauses (ii), (iii), (iv).

    (ii)/(iv) test that the first moments of the asymmetric part
    ``K2 = (a - a ^ a(-y)) J`` over annuli inside (ii) or outside (iv) the
    unit ball vanish, relative to the mass of ``|y| K2``. (iii) sweeps
    ``int_{|z|>1} |z| j(t|z|) dz / j(t)`` over t in (0, 1).
    """
    d = kernel.d if d is None else d
    sigma = _sigma_of(kernel, sigma)
    hid = f"H3{clause}"
    if _is_one(sigma):
        return HypothesisCertificate(hid, INCONCLUSIVE, {"sigma": sigma},
                                     notes="vacuous for sigma = 1")
    if clause in ("ii", "iii") and sigma > 1:
        return HypothesisCertificate(hid, FAIL, {"sigma": sigma}, notes="clause requires sigma < 1")
    if clause == "iv" and sigma < 1:
        return HypothesisCertificate(hid, FAIL, {"sigma": sigma}, notes="clause requires sigma > 1")
    if clause == "iii":
        breaks = np.geomspace(1.0, 1e12, 12 * 8 + 1)
        r, w = panel_nodes(breaks)
        cut = r <= 1e8

        def sweep(t):
            logv = (np.log(w) + d * np.log(r))[None, :] \
                + kernel.log(t[:, None] * r[None, :]) - kernel.log(t)[:, None]
            full = np.exp(logsumexp(logv, axis=1)) * sphere_area(d)
            part = np.exp(logsumexp(logv[:, cut], axis=1)) * sphere_area(d)
            return full, part

        with np.errstate(over="ignore", invalid="ignore"):
            full, part = sweep(_log_grid(1e-3, 1.0)[:-1])
            full_ext, _ = sweep(_log_grid(1e-4, 1.0)[:-1])
        kappa3 = float(np.max(full))
        kappa3_ext = float(np.max(full_ext))
        grid = _grid_info(1e-3, 1.0, z_max=1e12)
        consts = {"kappa3": kappa3, "kappa3_extended": kappa3_ext, "sigma": sigma}
        if not np.isfinite(kappa3) or np.max(np.abs(full / part - 1)) > 1e-3:
            return HypothesisCertificate(hid, FAIL, consts, grid, np.inf,
                                         "tail moment does not converge")
        if abs(kappa3_ext / kappa3 - 1) > 0.05:
            return HypothesisCertificate(hid, FAIL, consts, grid, kappa3_ext / kappa3,
                                         "supremum grows as t decreases")
        return HypothesisCertificate(hid, PASS, consts, grid, 1.0)
    if clause not in ("ii", "iv"):
        raise ValueError(f"unknown H3 clause '{clause}'")
    lo, hi = (1e-6, 1.0) if clause == "ii" else (1.0, 1e6)
    edges = [e for e in coefficient.edges if lo < e < hi]
    breaks = np.unique(np.concatenate([_log_grid(lo, hi, 8), edges]))
    r, w = panel_nodes(breaks)
    radial = w * r ** d * kernel(r)
    worst = 0.0
    for i in range(d):
        ang, mass = _angular_asymmetry(coefficient, r, i)
        num = radial * ang
        den = radial * mass
        # cumulative annulus integrals from the unit sphere outwards/inwards
        if clause == "ii":
            num_c, den_c = np.cumsum(num[::-1]), np.cumsum(den[::-1])
        else:
            num_c, den_c = np.cumsum(num), np.cumsum(den)
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(den_c > 0, np.abs(num_c) / den_c, 0.0)
        worst = max(worst, float(np.max(rel)))
    grid = _grid_info(lo, hi, 8 * 16)
    verdict = PASS if worst <= ZERO_TOL else FAIL
    return HypothesisCertificate(hid, verdict, {"max_relative_moment": worst, "sigma": sigma},
                                 grid, worst / ZERO_TOL)


def check_cancellation(spec, d=None):
    """Vanishing first angular moments of ``a J`` on every sphere (sigma = 1).

    Outside the sigma = 1 regime the check is a vacuous pass.
    """
    d = spec.d if d is None else d
    if spec.chi_regime != "unit-ball":
        return HypothesisCertificate("CANCEL", PASS, {"sigma": spec.sigma},
                                     notes="vacuous: sigma != 1")
    coef = spec.effective_coefficient
    # half-step offset keeps radii off shell edges such as r = 1, where
    # rounding in the direction nodes could split antipodal pairs
    r = _log_grid(1e-6, 1e6) * 10 ** (0.5 / POINTS_PER_DECADE)
    dirs, w = sphere_rule(d, coef.n_sectors, total=256)
    vals = coef(r[:, None, None] * dirs[None, :, :])
    mass = vals @ w
    worst = 0.0
    for i in range(d):
        mom = vals @ (w * dirs[:, i])
        worst = max(worst, float(np.max(np.abs(mom) / mass)))
    rule = {1: "two-point", 2: "circle", 3: "product Gauss x azimuth"}[d]
    grid = _grid_info(1e-6, 1e6, angular_rule=rule, angular_nodes=int(w.size))
    verdict = PASS if worst <= ZERO_TOL else FAIL
    return HypothesisCertificate("CANCEL", verdict, {"max_relative_moment": worst}, grid,
                                 worst / ZERO_TOL)


def check_two_sided(kernel, d=None, sigma=None, r_range=(1e-4, 1e4)):
    """Lower scaling bounds of ``j``: a necessary form and a sufficient form for H2.

    Verdict follows the necessary lower bound ``j(t) >= N (s/t)^(d+m) j(s)``
    (m = 1 if sigma < 1 else 2). The best lower exponent ``alpha1`` is
    fitted; if it lies below 1 (sigma < 1) or 2 (sigma >= 1) the sufficient
    condition for H2 holds and check_H2 is run as a cross-check.
    """
    d = kernel.d if d is None else d
    sigma = _sigma_of(kernel, sigma)
    m = 1 if sigma < 1.0 - 1e-12 else 2
    r = _log_grid(*r_range)
    logr = np.log(r)
    with np.errstate(divide="ignore"):
        logj = kernel.log(r)
    grid = _grid_info(*r_range)
    if not np.all(np.isfinite(logj)):
        return HypothesisCertificate("TWO-SIDED", FAIL, {"N_to": 0.0}, grid, np.inf,
                                     "j vanishes on the grid; lower bound impossible")
    alpha1 = float(np.max(_pair_rates(logr, logj))) - d
    N_to = float(np.exp(_min_log_ratio(logr, logj, d + m)))
    r_ext = _log_grid(r_range[0] / 10, r_range[1] * 10)
    with np.errstate(divide="ignore"):
        logj_ext = kernel.log(r_ext)
    N_ext = float(np.exp(_min_log_ratio(np.log(r_ext), logj_ext, d + m))) \
        if np.all(np.isfinite(logj_ext)) else 0.0
    bound = 1.0 if m == 1 else 2.0
    sufficient = alpha1 < bound - 1e-9
    consts = {"alpha1": alpha1, "N_to": N_to, "N_to_extended": N_ext, "moment": m,
              "sufficient_for_H2": bool(sufficient), "sigma": sigma}
    if sufficient:
        consts["sufficient_N"] = float(np.exp(_min_log_ratio(logr, logj, d + alpha1)))
        h2 = check_H2(kernel, d, sigma)
        consts["h2_crosscheck"] = h2.verdict
    holds = N_to > 0 and N_ext >= N_to / SLACK ** 2 and N_ext > 1e-300
    notes = ""
    if sufficient and consts["h2_crosscheck"] != PASS:
        notes = "sufficient lower bound holds but H2 check failed"
    return HypothesisCertificate("TWO-SIDED", PASS if holds else FAIL, consts, grid,
                                 (N_to / N_ext) if N_ext > 0 else np.inf, notes)


def check_symbol_growth(phi, alpha_target, xi_range=(1e-2, 1e4)):
    """Growth ``1 + phi(|xi|^2) >= N |xi|^alpha_target``.

    Passes when the infimum over the grid is positive and does not drop by
    more than the slack factor when the grid is extended to 1e6.
    """
    xi = _log_grid(*xi_range)
    ratio = (1.0 + phi(xi ** 2)) / xi ** alpha_target
    inf = float(np.min(ratio))
    xi_ext = _log_grid(xi_range[0], 1e6)
    inf_ext = float(np.min((1.0 + phi(xi_ext ** 2)) / xi_ext ** alpha_target))
    consts = {"N": inf, "N_extended": inf_ext, "alpha_target": alpha_target,
              "argmin": float(xi[np.argmin(ratio)])}
    ok = inf > 0 and inf_ext >= inf / SLACK
    return HypothesisCertificate("SYMBOL-GROWTH", PASS if ok else FAIL, consts,
                                 _grid_info(*xi_range, extended_to=1e6),
                                 inf / inf_ext if inf_ext > 0 else np.inf)


def certify(spec):
    """Standard certificate set for an operator specification."""
    k = spec.kernel
    certs = [check_levy(k), estimate_sigma(k), check_H1(k, sigma=spec.sigma),
             check_H2(k, sigma=spec.sigma), check_cancellation(spec)]
    if not _is_one(spec.sigma):
        clause = "ii" if spec.sigma < 1 else "iv"
        certs.append(check_H3(k, spec.coefficient, sigma=spec.sigma, clause=clause))
        if spec.sigma < 1:
            certs.append(check_H3(k, spec.coefficient, sigma=spec.sigma, clause="iii"))
    return certs
