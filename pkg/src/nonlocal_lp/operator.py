"""Application of the non-local operators to grid functions.

Two independent pathways:

* :func:`apply_spectral` multiplies the spectrum by a :class:`SymbolTable`.
* :func:`apply_direct` evaluates the defining integral in ``y`` with its own
  quadrature. Values ``u(x + y)`` at off-lattice points come from
  trigonometric interpolation, so a weighted sum over nodes ``y_i`` is
  carried out as one multiplier ``sum_i w_i exp(i xi . y_i)`` followed by a
  single inverse transform.

The ``y`` domain is split at ``delta = 2h`` and ``R_far``:

(a) ``|y| < delta``: Taylor series of ``u(x + y)`` about ``x`` with
    spectral derivatives against the radial moments of ``a J``;
(b) ``delta <= |y| < R_far``: radial Gauss-Legendre panels of width ``h``
    times the angular rule;
(c) ``|y| >= R_far``: in d = 1 the kernel is periodised over the box and
    integrated against one period of ``u``; in d >= 2 ``u(x + y)`` is
    replaced by its mean (mean-field far zone).
"""
from __future__ import annotations

import warnings
from math import factorial

import numpy as np
from scipy.special import roots_legendre

from .fieldops import GridFunction, dft, idft, top_octave_fraction
from .quadrature import panel_nodes, power_law_head, radial_breaks, sphere_rule
from .radial import radial_integral
from .symbol import _require_certificates

BAND_LIMIT = 1e-6
TAYLOR_TOL = 1e-17
PERIODS = 256
FAR_FRACTION = 2.0  # R_far / box in d >= 2


class BandLimitWarning(UserWarning):
    """The input field has spectral energy in the top octave."""


def apply_spectral(table, u):
    """``idft(m * dft(u))`` with the Hermitian part of ``m``.

    Raises
    ------
    ValueError
        If the table and the field live on different grids.
    """
    if table.grid != u.grid:
        raise ValueError(f"grid mismatch: {table.grid} vs {u.grid}")
    return idft(table.hermitian() * dft(u), u.grid)


# ---------------------------------------------------------------------------
# direct quadrature
# ---------------------------------------------------------------------------

def _angular_rule(coef, d):
    return sphere_rule(d, coef.n_sectors, total=256)


def _coef_matrix(coef, r, dirs):
    """``a(r_i theta_q)`` as an (len(r), len(dirs)) array."""
    pts = r[:, None, None] * dirs[None, :, :]
    return coef(pts)


def _inner_moments(spec, delta, dirs, wq, n_terms):
    """``A[k, q] = w_q int_0^delta r^(k+d-1) j(r) a(r theta_q) c_k(r) dr``.

    ``c_1(r) = 1 - chi(r)`` removes the compensated first-order term;
    ``c_k = 1`` otherwise.
    """
    d = spec.d
    coef = spec.effective_coefficient
    R_chi = spec.compensator_radius
    extra = tuple(e for e in coef.edges if 0 < e < delta)
    if 0 < R_chi < delta:
        extra += (R_chi,)
    breaks = radial_breaks(0.0, delta, extra=extra)
    r, w = panel_nodes(breaks)
    base = w * spec.kernel(r) * r ** (d - 1)
    F = _coef_matrix(coef, r, dirs)
    r0 = breaks[0]
    rh = np.array([r0, 2 * r0])
    gh = spec.kernel(rh) * rh ** (d - 1)
    Fh = _coef_matrix(coef, rh, dirs)
    A = np.zeros((n_terms + 1, dirs.shape[0]))
    for k in range(1, n_terms + 1):
        ck = (r >= R_chi).astype(float) if k == 1 else 1.0
        A[k] = (base * r ** k * ck) @ F
        if k > 1 or R_chi == 0.0:
            f0 = gh[0] * r0 ** k * Fh[0]
            f1 = gh[1] * (2 * r0) ** k * Fh[1]
            A[k] += np.nan_to_num(power_law_head(r0, f0, 2 * r0, f1))
    return A * wq[None, :]


def _taylor_multiplier(A, proj):
    """``sum_k (i^k / k!) sum_q A[k, q] (xi . theta_q)^k`` for rows of ``proj``."""
    out = np.zeros(proj.shape[0], dtype=complex)
    power = np.ones_like(proj)
    last = 0.0
    for k in range(1, A.shape[0]):
        power = power * proj
        term = (power @ A[k]) * (1j ** k / factorial(k))
        out += term
        last = float(np.max(np.abs(term)))
    return out, last


def _n_taylor_terms(x_max):
    k = 1
    size = x_max
    while size > TAYLOR_TOL or k < 4:
        k += 1
        size *= x_max / k
    return k


def _shell_nodes(spec, lo, hi, h, dirs, wq):
    """Nodes ``y`` and weights ``a(y) J(y) dy`` on ``lo <= |y| < hi``."""
    d = spec.d
    coef = spec.effective_coefficient
    extra = [e for e in coef.edges if lo < e < hi]
    if lo < spec.compensator_radius < hi:
        extra.append(spec.compensator_radius)
    breaks = radial_breaks(lo, hi, osc_step=h, extra=extra)
    r, w = panel_nodes(breaks, order=8)
    F = _coef_matrix(coef, r, dirs)
    W = (w * spec.kernel(r) * r ** (d - 1))[:, None] * F * wq[None, :]
    y = r[:, None, None] * dirs[None, :, :]
    chi = np.broadcast_to((r < spec.compensator_radius)[:, None], W.shape)
    return y.reshape(-1, d), W.ravel(), chi.ravel()


def _phase_sum(k_axis, d, y, W, chi, chunk=4096):
    """``sum_i W_i (exp(i xi . y_i) - 1 - i xi . y_i chi_i)`` on the lattice.

    The lattice is the tensor product of ``k_axis``, so the exponential
    factorises over axes and the node sum becomes matrix products.
    """
    n = k_axis.size
    out = np.zeros((n,) * d, dtype=complex)
    for lo in range(0, y.shape[0], chunk):
        yy, ww = y[lo:lo + chunk], W[lo:lo + chunk]
        E = [np.exp(1j * np.outer(k_axis, yy[:, a])) for a in range(d)]
        if d == 1:
            out += E[0] @ ww
        elif d == 2:
            out += (E[0] * ww) @ E[1].T
        else:
            E0w = E[0] * ww
            for i in range(n):
                out[i] += (E[1] * E0w[i]) @ E[2].T
    out -= W.sum()
    drift = (y * (W * chi)[:, None]).sum(axis=0)
    for a in range(d):
        shape = [1] * d
        shape[a] = n
        out -= 1j * drift[a] * k_axis.reshape(shape)
    return out.ravel()


def _periodised_tail_1d(spec, R, B, h, xi):
    """Zone (c) in d = 1 on a torus of period ``B``.

    For lattice frequencies ``exp(i xi (R + s + mB)) = exp(i xi (R + s))``,
    so the tail folds onto one period with kernel
    ``G(s) = sum_m g(R + s + mB)``; the sum is truncated after ``PERIODS``
    terms and closed by the Euler-Maclaurin formula.
    """
    coef = spec.effective_coefficient
    j = spec.kernel
    s, ws = panel_nodes(np.arange(0.0, B + 0.5 * h, h), order=8)
    x16, w16 = roots_legendre(16)
    out = np.zeros(xi.shape, dtype=complex)
    for sign in (1.0, -1.0):
        def g(r, sign=sign):
            r = np.asarray(r, dtype=float)
            return coef(sign * r.reshape(-1, 1)).reshape(r.shape) * j(r)

        m = np.arange(PERIODS)
        G = g(R + s[:, None] + B * m[None, :]).sum(axis=1)
        t0 = R + PERIODS * B
        t = t0 + s
        T0 = radial_integral(g, t0, np.inf)
        # int_{t0}^{t} g by 16-point Gauss-Legendre per node
        mid, half = 0.5 * (t + t0), 0.5 * (t - t0)
        partial = (g(mid[:, None] + half[:, None] * x16[None, :]) @ w16) * half
        eps = 1e-4 * t
        dg = (g(t + eps) - g(t - eps)) / (2 * eps)
        G += (T0 - partial) / B + 0.5 * g(t) - B * dg / 12.0
        W = ws * G
        mass = radial_integral(g, R, np.inf)
        out += np.exp(1j * sign * np.outer(xi, R + s)) @ W - mass
        if np.isinf(spec.compensator_radius):
            first = radial_integral(lambda r: r * g(r), R, np.inf)
            out -= 1j * sign * xi * first
    return out


def _mean_field_tail(spec, R, dirs, wq, xi):
    """Zone (c) in d >= 2: ``u(x + y)`` replaced by the mean of ``u``."""
    d = spec.d
    coef = spec.effective_coefficient
    comp = np.isinf(spec.compensator_radius)
    finite = [e for e in coef.edges if 0 < e < np.inf]
    if coef.values is not None and R >= max(finite):
        # cell coefficient: constant in r beyond the last finite edge
        aq = coef.on_sphere(2.0 * R, dirs)
        radial = lambda r: spec.kernel(r) * r ** (d - 1)
        mass = aq * radial_integral(radial, R, np.inf)
        first = aq * radial_integral(lambda r: r * radial(r), R, np.inf) if comp else 0 * aq
    else:
        mass = np.zeros(dirs.shape[0])
        first = np.zeros(dirs.shape[0])
        for q, th in enumerate(dirs):
            g = lambda r, th=th: (coef(np.asarray(r)[:, None] * th[None, :])
                                  * spec.kernel(r) * r ** (d - 1))
            mass[q] = radial_integral(g, R, np.inf)
            if comp:
                first[q] = radial_integral(lambda r: r * g(r), R, np.inf)
    out = np.full(xi.shape[0], -float(mass @ wq), dtype=complex)
    out[np.all(xi == 0, axis=1)] = 0.0
    if np.isinf(spec.compensator_radius):
        out -= 1j * (xi @ (dirs.T @ (first * wq)))
    return out


def apply_direct(spec, u, return_info=False):
    """Evaluate ``L u`` by singular quadrature in ``y``.

    Parameters
    ----------
    spec : OperatorSpec
    u : GridFunction
        Band-limited field; a :class:`BandLimitWarning` is issued when the
        top-octave energy share exceeds ``1e-6``.
    return_info : bool
        Also return a dict with the zone radii, the Taylor truncation
        term and the band-limit measure.

    Raises
    ------
    CertificateError
        For kernels failing the Levy check, or sigma = 1 without
        cancellation.
    """
    _require_certificates(spec)
    grid = u.grid
    if grid.d != spec.d:
        raise ValueError("spec and grid dimensions differ")
    d, h, B = grid.d, grid.h, grid.box
    band = top_octave_fraction(u)
    if band > BAND_LIMIT:
        warnings.warn(f"top-octave energy share {band:.2e} exceeds {BAND_LIMIT:g}; "
                      "direct quadrature assumes band-limited input", BandLimitWarning,
                      stacklevel=2)
    coef = spec.effective_coefficient
    dirs, wq = _angular_rule(coef, d)
    xi = np.stack([f.ravel() for f in grid.frequencies()], axis=1)
    delta = 2.0 * h
    finite = [e for e in coef.edges if 0 < e < np.inf] if coef.values is not None else [1.0]
    R_far = max(B / 4 if d == 1 else FAR_FRACTION * B, max(finite), 2 * delta)
    if np.isfinite(spec.compensator_radius):
        R_far = max(R_far, spec.compensator_radius)

    x_max = float(np.max(np.linalg.norm(xi, axis=1))) * delta
    n_terms = _n_taylor_terms(x_max)
    A = _inner_moments(spec, delta, dirs, wq, n_terms)
    mult, last = _taylor_multiplier(A, xi @ dirs.T)

    y, W, chi = _shell_nodes(spec, delta, R_far, h, dirs, wq)
    mult += _phase_sum(grid.freq_axis(), d, y, W, chi)
    if d == 1:
        mult += _periodised_tail_1d(spec, R_far, B, h, xi[:, 0])
        far = "periodised"
    else:
        mult += _mean_field_tail(spec, R_far, dirs, wq, xi)
        far = "mean-field"
    mult = mult.reshape(grid.shape)
    # real input and real kernel: keep the Hermitian part
    flipped = mult
    for ax in range(d):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    mult = 0.5 * (mult + np.conj(flipped))
    out = idft(mult * dft(u), grid)
    if return_info:
        info = dict(delta=delta, R_far=R_far, taylor_terms=n_terms, taylor_last_term=last,
                    band_fraction=band, far_zone=far, n_nodes=int(W.size))
        return out, info
    return out


def inner_product(u, v):
    """Grid inner product ``sum u v h^d``."""
    if u.grid != v.grid:
        raise ValueError("grid mismatch")
    return float(np.sum(u.values * v.values) * u.grid.cell_volume)


__all__ = ["BandLimitWarning", "apply_direct", "apply_spectral", "inner_product",
           "GridFunction"]
