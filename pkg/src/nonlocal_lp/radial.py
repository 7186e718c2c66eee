"""One-dimensional radial integrals behind every symbol and moment.

All multidimensional integrals in the package are reduced to integrals in
the radius ``r`` against ``g(r) = j(r) r^(d-1)``. Oscillatory pieces are
split into a composite Gauss-Legendre part near the origin and a
Fourier-weighted QUADPACK (QAWF) tail.
"""
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .quadrature import panel_nodes, power_law_head, radial_breaks

R_MIN = 1e-14
QUAD_OPTS = dict(epsabs=1e-14, epsrel=1e-11, limit=400)


class QuadratureError(RuntimeError):
    """Raised when a quadrature misses its tolerance."""


def one_minus_cos(x):
    return 2.0 * np.sin(0.5 * x) ** 2


def sin_minus_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 2e-2
    x2 = x * x
    series = -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    return np.where(small, series, np.sin(x) - x)


def _quad(f, a, b, **kw):
    opts = dict(QUAD_OPTS)
    opts.update(kw)
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            val, err = quad(f, a, b, **opts)
        except IntegrationWarning as exc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                val, err = quad(f, a, b, **opts)
            scale = max(abs(val), 1e-300)
            if err > 1e-6 * scale + 1e-13:
                raise QuadratureError(
                    f"quadrature on [{a}, {b}] did not converge: value {val:.6g}, "
                    f"error estimate {err:.3g} ({exc})") from None
    return val


def radial_integral(f, a, b, extra=(), r_min=R_MIN):
    """Integral of a non-oscillatory radial integrand ``f`` over [a, b].

    ``b`` may be ``inf``; the part beyond ``max(a, 1)`` then goes to
    adaptive quadrature. An integrable power-law singularity at ``a = 0``
    is closed analytically below ``r_min``.
    """
    total = 0.0
    split = b
    if np.isinf(b):
        split = max(a, 1.0, *[e for e in extra if np.isfinite(e)])
        tail = _quad(lambda r: float(f(np.array([r]))[0]), split, np.inf)
        total += tail
    if split > a:
        breaks = radial_breaks(a, split, r_min=r_min, extra=extra)
        nodes, weights = panel_nodes(breaks)
        total += float(np.sum(weights * f(nodes)))
        if a == 0.0:
            r0 = breaks[0]
            head = float(power_law_head(r0, f(np.array([r0]))[0],
                                        2 * r0, f(np.array([2 * r0]))[0]))
            if np.isnan(head):
                raise QuadratureError("radial integrand is not integrable at the origin")
            total += head
    if not np.isfinite(total):
        raise QuadratureError("radial integral is not finite")
    return total


def oscillatory_shell(g, a, b, omegas, chi_cut=0.0, r_min=R_MIN):
    """Cosine/sine moments of a radial density over the shell [a, b].

    Returns ``(C, S)`` with, for each frequency ``w`` in ``omegas``::

        C(w) = int_a^b (1 - cos(w r)) g(r) dr
        S(w) = int_a^b (sin(w r) - w r 1{r < chi_cut}) g(r) dr

    ``omegas`` must be non-negative. ``b`` may be ``inf``. ``S`` is NaN
    where the sine moment diverges at the origin.
    """
    omegas = np.asarray(omegas, dtype=float)
    C = np.zeros_like(omegas)
    S = np.zeros_like(omegas)
    nz = omegas > 0
    if not np.any(nz):
        return C, S
    w = omegas[nz]
    w_max = float(w.max())
    split = b
    if np.isinf(b):
        split = max(a, 1.0)
        if np.isfinite(chi_cut):
            split = max(split, chi_cut)
    if split > a:
        breaks = radial_breaks(a, split, r_min=r_min, osc_step=np.pi / (2 * w_max),
                               extra=(chi_cut,) if np.isfinite(chi_cut) else ())
        nodes, weights = panel_nodes(breaks)
        gw = g(nodes) * weights
        chi = (nodes < chi_cut).astype(float)
        # chunk over frequencies to bound memory
        for lo in range(0, w.size, 256):
            ww = w[lo:lo + 256, None]
            x = ww * nodes[None, :]
            C[np.flatnonzero(nz)[lo:lo + 256]] = one_minus_cos(x) @ gw
            s_int = np.where(chi[None, :] > 0, sin_minus_x(x), np.sin(x))
            S[np.flatnonzero(nz)[lo:lo + 256]] = s_int @ gw
        if a == 0.0:
            r0 = breaks[0]
            g0, g1 = g(np.array([r0, 2 * r0]))
            c_head = power_law_head(r0, one_minus_cos(w * r0) * g0,
                                    2 * r0, one_minus_cos(2 * w * r0) * g1)
            sfun = sin_minus_x if chi_cut > 0 else np.sin
            s_head = power_law_head(r0, sfun(w * r0) * g0, 2 * r0, sfun(2 * w * r0) * g1)
            if np.any(np.isnan(c_head)):
                raise QuadratureError("symbol integrand is not integrable at the origin")
            # a divergent sine moment (missing compensator) is reported as NaN
            C[nz] += c_head
            S[nz] += s_head
    if np.isinf(b):
        gs = lambda r: float(g(np.array([r]))[0])
        mass = _quad(gs, split, np.inf)
        first = 0.0
        if np.isinf(chi_cut):
            first = _quad(lambda r: r * gs(r), split, np.inf)
        idx = np.flatnonzero(nz)
        for i, om in zip(idx, w):
            c_t = _fourier_tail(g, split, om, "cos")
            s_t = _fourier_tail(g, split, om, "sin")
            C[i] += mass - c_t
            S[i] += s_t - om * first
    return C, S


def _fourier_tail(g, start, omega, kind, attempts=6):
    """``int_start^inf g(r) cos|sin(omega r) dr`` by QAWF.

    When the cycle extrapolation fails (tabulated densities are only
    piecewise smooth), a block of periods is integrated with panels and
    QAWF is retried further out.
    """
    trig = np.cos if kind == "cos" else np.sin
    gs = lambda r: float(g(np.array([r]))[0])
    head = 0.0
    for _ in range(attempts):
        try:
            return head + _quad(gs, start, np.inf, weight=kind, wvar=omega, limlst=200)
        except QuadratureError:
            period = 2 * np.pi / omega
            stop = start + max(64 * period, 4 * start)
            nodes, wts = panel_nodes(radial_breaks(start, stop, osc_step=period / 4))
            head += float(np.sum(wts * g(nodes) * trig(omega * nodes)))
            start = stop
    return head + _quad(gs, start, np.inf, weight=kind, wvar=omega, limlst=200)


def angular_reduce(cfun, rho, d, panels_per_decade=8, decades=10):
    """Integral over the unit sphere of ``cfun(rho * theta_1)``.

    ``cfun`` is even and vectorised. For d >= 2 the sphere integral of a
    function of one coordinate reduces to one angle ``phi``::

        2 |S^{d-2}| int_0^{pi/2} C(rho sin phi) cos(phi)^(d-2) dphi

    integrated on panels graded geometrically towards ``phi = 0`` where
    ``C`` may only be Hoelder continuous.
    """
    from .quadrature import sphere_area

    if d == 1:
        return 2.0 * cfun(np.array([rho]))[0]
    lo = (np.pi / 2) * 10.0 ** (-decades)
    breaks = np.concatenate([[0.0], np.geomspace(lo, np.pi / 2, decades * panels_per_decade + 1)])
    phi, w = panel_nodes(breaks)
    vals = cfun(rho * np.sin(phi)) * np.cos(phi) ** (d - 2)
    return 2.0 * sphere_area(d - 1) * float(np.sum(w * vals))
