"""Shared quadrature building blocks.

Composite Gauss-Legendre panels on mixed geometric/uniform breakpoints,
angular rules for the unit sphere in d = 1, 2, 3, and sphere areas.
"""
from functools import lru_cache

import numpy as np
from scipy.special import gamma

GL_ORDER = 16
PANELS_PER_DECADE = 8  # 16 nodes x 8 panels = 128 nodes per decade


@lru_cache(maxsize=None)
def gauss_legendre(order=GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def sphere_area(d):
    """Surface measure of the unit sphere S^{d-1} (2 for d = 1)."""
    return 2.0 * np.pi ** (d / 2) / gamma(d / 2)


def panel_nodes(breaks, order=GL_ORDER):
    """Gauss-Legendre nodes and weights on consecutive panels ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    a, b = breaks[:-1], breaks[1:]
    x, w = gauss_legendre(order)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def radial_breaks(a, b, r_min=1e-14, osc_step=None, extra=()):
    """Breakpoints on [a, b] mixing geometric and uniform spacing.

    Geometric points (``PANELS_PER_DECADE`` per decade) resolve algebraic
    singularities at the origin; uniform points of spacing ``osc_step``
    resolve oscillation. When ``a == 0`` the first break is ``r_min``.
    """
    lo = max(a, r_min)
    pts = [lo, b]
    n_dec = np.log10(b / lo)
    if n_dec > 0:
        pts.extend(np.logspace(np.log10(lo), np.log10(b),
                               int(np.ceil(n_dec * PANELS_PER_DECADE)) + 1))
    if osc_step is not None and osc_step > 0 and b - lo > osc_step:
        start = max(lo, osc_step)
        pts.extend(np.arange(start, b, osc_step))
    pts.extend(e for e in extra if lo < e < b)
    pts = np.unique(np.asarray(pts, dtype=float))
    return pts


def power_law_head(r0, g0, r1, g1):
    """Integral over (0, r0] of a power law through (r0, g0) and (r1, g1).

    Used to close radial integrals at the origin. Returns 0 where the two
    samples do not share a sign and NaN where the fitted power is not
    integrable (exponent <= -1).
    """
    g0 = np.asarray(g0, dtype=float)
    g1 = np.asarray(g1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.log(np.abs(g1) / np.abs(g0)) / np.log(r1 / r0)
        head = g0 * r0 / (p + 1.0)
    same_sign = g0 * g1 > 0
    divergent = same_sign & ~(p > -1.0 + 1e-9)
    return np.where(divergent, np.nan, np.where(same_sign, head, 0.0))


def circle_rule(n_sectors=1, nodes_per_sector=None, total=256):
    """Angles and weights on [0, 2*pi) aligned with ``n_sectors`` sectors.

    With one sector this is the periodic trapezoid rule (``total``
    points); with several, Gauss-Legendre on each sector so that
    piecewise-constant angular data are integrated without edge error.
    """
    if n_sectors <= 1:
        theta = 2 * np.pi * np.arange(total) / total
        return theta, np.full(total, 2 * np.pi / total)
    k = nodes_per_sector or max(8, total // n_sectors)
    edges = np.linspace(0.0, 2 * np.pi, n_sectors + 1)
    return panel_nodes(edges, order=k)


def sphere_rule(d, n_sectors=1, total=256):
    """Directions (m, d) and weights (m,) integrating over S^{d-1}."""
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        theta, w = circle_rule(n_sectors, total=total)
        return np.stack([np.cos(theta), np.sin(theta)], axis=1), w
    if d == 3:
        # product rule: Gauss-Legendre in cos(polar) on each hemisphere,
        # sector-aligned rule in azimuth
        n_az = max(1, n_sectors // 2)
        phi, wphi = circle_rule(n_az, total=max(32, total // 4))
        ct, wct = panel_nodes([-1.0, 0.0, 1.0], order=16)
        st = np.sqrt(1.0 - ct ** 2)
        dirs = np.stack([
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.repeat(ct, phi.size),
        ], axis=1)
        return dirs, np.outer(wct, wphi).ravel()
    raise ValueError(f"unsupported dimension d={d}")
