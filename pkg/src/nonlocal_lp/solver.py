"""Solvers for ``(L - lambda) u = f`` on the periodic grid.

* :func:`resolvent_solve` divides the spectrum by ``m - lambda``.
* :func:`semigroup_solve` integrates ``-int_0^inf exp(-lambda t) P_t f dt``
  in time, ``P_t`` being the multiplier ``exp(t g(xi))`` of the generator.
* :func:`feynman_kac_mc` estimates ``u(x) = -(1/lambda) E f(x + X_T)`` with
  an exponential time ``T`` and a rotationally symmetric stable ``X``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import roots_genlaguerre, roots_legendre
from scipy.stats import levy_stable

from .fieldops import GridFunction, dft, idft, lp_norm
from .operator import apply_spectral

MIN_PATHS = 1000


@dataclass
class SolveResult:
    """Solution of a resolvent problem with its diagnostics.

    Attributes
    ----------
    u : GridFunction or None
        Grid solution (None for pointwise Monte Carlo estimates).
    method : str
    residual : float or None
        ``||(L - lambda) u - f||_2 / ||f||_2`` via the spectral pathway.
    diagnostics : dict
    """

    u: Optional[GridFunction]
    method: str
    residual: Optional[float]
    diagnostics: dict = field(default_factory=dict)


def _check_lambda(lam):
    lam = float(lam)
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return lam


def _residual(table, u, f, lam):
    r = apply_spectral(table, u) - lam * u - f
    nf = lp_norm(f, 2)
    return lp_norm(r, 2) / nf if nf > 0 else lp_norm(r, 2)


def resolvent_solve(table, f, lam):
    """``u_hat = f_hat / (m - lambda)``.

    Raises
    ------
    ValueError
        If ``lam <= 0`` or the grids differ.
    """
    lam = _check_lambda(lam)
    if table.grid != f.grid:
        raise ValueError("grid mismatch between symbol table and data")
    m = table.hermitian()
    u = idft(dft(f) / (m - lam), f.grid)
    return SolveResult(u, "spectral", _residual(table, u, f, lam),
                       {"lambda": lam, "min_abs_denominator": float(np.min(np.abs(m - lam)))})


def _generator(table):
    """Multiplier ``g`` of the semigroup ``exp(t g)`` encoded by ``table``.

    A ``Phi`` table stores ``-Phi(xi)``; the semigroup uses ``-Phi(-xi)``.
    """
    m = table.hermitian()
    if table.variant != "Phi":
        return m
    flipped = m
    for ax in range(table.grid.d):
        flipped = np.roll(np.flip(flipped, axis=ax), 1, axis=ax)
    return flipped


def _time_rule(rule, lam, g_max, nodes, order=16, subpanels=4):
    if rule == "laguerre":
        t, w = roots_genlaguerre(nodes, 0.0)
        # the exp(-lambda t) weight is kept in the integrand below
        return t / lam, w * np.exp(t) / lam
    if rule != "dyadic":
        raise ValueError(f"unknown time rule '{rule}'")
    t_end = 40.0 / lam
    t0 = min(1e-3 / max(g_max, lam), t_end * 1e-6)
    edges = [0.0] + list(np.geomspace(t0, t_end, int(np.ceil(np.log2(t_end / t0))) + 1))
    fine = np.concatenate([np.linspace(a, b, subpanels + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
                          + [[t_end]])
    x, wx = roots_legendre(order)
    a, b = fine[:-1], fine[1:]
    t = (0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * x[None, :]).ravel()
    w = (0.5 * (b - a)[:, None] * wx[None, :]).ravel()
    return t, w


def semigroup_solve(table, f, lam, rule="dyadic", nodes=64):
    """``u = -int_0^inf exp(-lambda t) P_t f dt`` by quadrature in ``t``.

    Parameters
    ----------
    table : SymbolTable
        Usually the ``Phi`` table, whose semigroup is generated by
        ``Ltilde``; any other variant is used as its own generator.
    rule : {"dyadic", "laguerre"}
        ``dyadic``: composite Gauss-Legendre on geometrically growing
        panels, robust for stiff modes. ``laguerre``: Gauss-Laguerre with
        scale ``1/lambda`` and ``nodes`` points, exact only for slowly
        varying modes.
    """
    lam = _check_lambda(lam)
    if table.grid != f.grid:
        raise ValueError("grid mismatch between symbol table and data")
    g = _generator(table)
    t, w = _time_rule(rule, lam, float(np.max(np.abs(g))), nodes)
    fh = dft(f)
    acc = np.zeros_like(g)
    for ti, wi in zip(t, w):
        acc += wi * np.exp(-lam * ti + ti * g)
    u = idft(-acc * fh, f.grid)
    from .symbol import SymbolTable
    gen = SymbolTable(table.grid, g, "generator", table.spec_key)
    # the single-mode error of the time rule is the exact quadrature error of 1/(lam - g)
    mode_err = float(np.max(np.abs(acc * (lam - g) - 1.0)))
    return SolveResult(u, f"semigroup-{rule}", _residual(gen, u, f, lam),
                       {"lambda": lam, "time_nodes": int(t.size), "mode_error": mode_err,
                        "mass_multiplier_at_zero": float(np.exp(t[-1] * g.flat[0]).real)})


# ---------------------------------------------------------------------------
# Monte Carlo
# ---------------------------------------------------------------------------

def sample_stable(alpha, d, scale, rng):
    """Rotationally symmetric stable vectors with ``E exp(i xi.X) = exp(-|scale xi|^alpha)``.

    ``scale`` is an array of per-sample scales. d = 1 uses the symmetric
    law directly; d >= 2 multiplies a Gaussian by the square root of a
    positive ``alpha/2``-stable variable.
    """
    scale = np.asarray(scale, dtype=float)
    n = scale.size
    if alpha == 2.0:
        return np.sqrt(2.0) * scale[:, None] * rng.standard_normal((n, d))
    if d == 1:
        s = levy_stable.rvs(alpha, 0.0, size=n, random_state=rng)
        return (scale * s)[:, None]
    beta = alpha / 2.0
    # totally skewed law with E exp(-s A) = exp(-s^beta)
    gamma = np.cos(np.pi * beta / 2.0) ** (1.0 / beta)
    A = levy_stable.rvs(beta, 1.0, scale=gamma, size=n, random_state=rng)
    G = np.sqrt(2.0) * rng.standard_normal((n, d))
    return scale[:, None] * np.sqrt(np.maximum(A, 0.0))[:, None] * G


def feynman_kac_mc(alpha, d, f, lam, points, paths=100_000, seed=0, period=None,
                   block=20_000):
    """Monte Carlo estimate of the resolvent for the stable generator.

    Parameters
    ----------
    alpha : float
        Stable index in (0, 2]; the generator has multiplier ``-|xi|^alpha``.
    f : callable
        ``f(x)`` for points of shape (m, d).
    points : array (k, d)
        Evaluation points.
    period : float, optional
        Box side; increments are wrapped to ``[-period/2, period/2)^d`` so
        the estimate refers to the periodic problem.
    block : int
        Paths per block; block ``b`` uses the stream ``(seed, b)``.

    Raises
    ------
    ValueError
        For fewer than ``MIN_PATHS`` paths or ``lam <= 0``.
    """
    lam = _check_lambda(lam)
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    if paths < MIN_PATHS:
        raise ValueError(f"refusing Monte Carlo with {paths} < {MIN_PATHS} paths")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[1] != d:
        raise ValueError("points must have shape (k, d)")
    k = points.shape[0]
    s1 = np.zeros(k)
    s2 = np.zeros(k)
    done = 0
    b = 0
    while done < paths:
        n = min(block, paths - done)
        rng = np.random.default_rng([seed, b])
        T = rng.exponential(1.0 / lam, size=n)
        X = sample_stable(alpha, d, T ** (1.0 / alpha), rng)
        for i, x in enumerate(points):
            y = x[None, :] + X
            if period is not None:
                y = (y + 0.5 * period) % period - 0.5 * period
            v = np.asarray(f(y), dtype=float)
            s1[i] += v.sum()
            s2[i] += (v * v).sum()
        done += n
        b += 1
    mean = s1 / paths
    var = np.maximum(s2 / paths - mean ** 2, 0.0)
    est = -mean / lam
    se = np.sqrt(var / paths) / lam
    return SolveResult(None, "monte-carlo", None,
                       {"points": points, "estimate": est, "stderr": se, "paths": paths,
                        "seed": seed, "blocks": b, "block_size": block, "alpha": alpha,
                        "lambda": lam})
