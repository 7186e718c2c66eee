"""Catalog of Bernstein functions used to build subordinate kernels.

Every catalog entry is a complete Bernstein function, so besides its
values on (0, inf) it carries two analytic descriptions of its Levy
measure ``mu``:

* ``levy_density(t)`` -- closed form of mu(dt)/dt, where one exists
  (sums of powers);
* ``boundary_im(s)`` -- Im phi(-s + i0), the Stieltjes density from which
  ``mu(t) = (1/pi) int_0^inf exp(-t s) Im phi(-s + i0) ds``.

The second is what makes jump kernels of the logarithmic and hyperbolic
entries computable without inverting a Laplace transform.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.special import gamma

CATALOG = ("powers", "power_mix", "log_up", "log_down", "logcosh", "logsinh")


@dataclass(frozen=True)
class BernsteinFunction:
    """A Bernstein function phi with phi(0+) = 0 and no drift.

    Attributes
    ----------
    name : catalog identifier (one of ``CATALOG``) or ``"custom"``.
    params : parameters as given to the constructor.
    func : vectorised map lam -> phi(lam) for lam > 0.
    exponents : (delta1, delta2, delta3, delta4) -- lower/upper scaling
        exponents at infinity and at zero, when known.
    sigma_index : upper index at infinity; the subordinate kernel in any
        dimension has order ``2 * sigma_index``.
    """

    name: str
    params: dict
    func: Callable
    exponents: Optional[tuple] = None
    sigma_index: Optional[float] = None
    levy_density: Optional[Callable] = field(default=None, repr=False)
    boundary_im: Optional[Callable] = field(default=None, repr=False)
    breakpoints: Optional[Callable] = field(default=None, repr=False)

    def __call__(self, lam):
        return self.func(np.asarray(lam, dtype=float))

    @property
    def key(self):
        return ("bernstein", self.name, tuple(sorted(
            (k, tuple(v) if isinstance(v, (list, tuple)) else v)
            for k, v in self.params.items())))


def _check_unit(name, value, lo=0.0, hi=1.0):
    if not lo < value < hi:
        raise ValueError(f"{name}={value} must lie in ({lo}, {hi})")


def _log_cosh_sqrt(lam):
    x = np.sqrt(lam)
    # log cosh x = x + log1p(exp(-2x)) - log 2, stable for large x
    small = x < 1e-4
    out = x + np.log1p(np.exp(-2 * x)) - np.log(2.0)
    return np.where(small, lam / 2 - lam ** 2 / 12, out)


def _log_sinh_over(lam):
    x = np.sqrt(lam)
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    big = xs + np.log1p(-np.exp(-2 * xs)) - np.log(2.0) - np.log(xs)
    return np.where(small, lam / 6 - lam ** 2 / 180, big)


def _arg_power_im(modulus, arg, power):
    """Im of (modulus * exp(i arg)) ** power, principal in (0, pi)."""
    return modulus ** power * np.sin(power * arg)


def powers(alphas):
    """phi(lam) = sum_i lam**alpha_i with 0 < alpha_i < 1."""
    alphas = tuple(float(a) for a in np.atleast_1d(alphas))
    for a in alphas:
        _check_unit("alpha", a)
    al = np.array(alphas)

    def func(lam):
        return np.sum(lam[..., None] ** al, axis=-1)

    def density(t):
        t = np.asarray(t, dtype=float)
        return np.sum(al / gamma(1 - al) * t[..., None] ** (-1 - al), axis=-1)

    def bim(s):
        s = np.asarray(s, dtype=float)
        return np.sum(s[..., None] ** al * np.sin(np.pi * al), axis=-1)

    lo, hi = min(alphas), max(alphas)
    return BernsteinFunction("powers", {"alphas": alphas}, func,
                             (lo, hi, lo, hi), hi, density, bim)


def power_mix(alpha, beta):
    """phi(lam) = (lam + lam**alpha)**beta."""
    _check_unit("alpha", alpha)
    _check_unit("beta", beta)

    def func(lam):
        return (lam + lam ** alpha) ** beta

    def bim(s):
        s = np.asarray(s, dtype=float)
        re = -s + s ** alpha * np.cos(np.pi * alpha)
        im = s ** alpha * np.sin(np.pi * alpha)
        return _arg_power_im(np.hypot(re, im), np.arctan2(im, re), beta)

    return BernsteinFunction("power_mix", {"alpha": alpha, "beta": beta}, func,
                             (beta, beta, alpha * beta, alpha * beta), beta,
                             None, bim)


def _log1p_boundary(s):
    """log(1 + lam) at lam = -s + i0 as (modulus, argument)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        re = np.where(s < 0.5, np.log1p(-np.minimum(s, 0.5)), np.log(np.abs(1.0 - s)))
    im = np.where(s > 1.0, np.pi, 0.0)
    # for s < 1 the imaginary part is +0, so the argument of the (negative)
    # real part is pi
    return np.hypot(re, im), np.arctan2(im, re)


def log_up(alpha, beta):
    """phi(lam) = lam**alpha * log(1+lam)**beta, beta < 1 - alpha."""
    _check_unit("alpha", alpha)
    _check_unit("beta", beta, 0.0, 1.0 - alpha)

    def func(lam):
        return lam ** alpha * np.log1p(lam) ** beta

    def bim(s):
        s = np.asarray(s, dtype=float)
        mod, arg = _log1p_boundary(s)
        return s ** alpha * mod ** beta * np.sin(np.pi * alpha + beta * arg)

    return BernsteinFunction("log_up", {"alpha": alpha, "beta": beta}, func,
                             (alpha, alpha + beta, alpha + beta, alpha + beta),
                             alpha, None, bim, lambda w_max: np.array([1.0]))


def log_down(alpha, beta):
    """phi(lam) = lam**alpha * log(1+lam)**(-beta), beta < alpha."""
    _check_unit("alpha", alpha)
    _check_unit("beta", beta, 0.0, alpha)

    def func(lam):
        return lam ** alpha * np.log1p(lam) ** (-beta)

    def bim(s):
        s = np.asarray(s, dtype=float)
        mod, arg = _log1p_boundary(s)
        return s ** alpha * mod ** (-beta) * np.sin(np.pi * alpha - beta * arg)

    return BernsteinFunction("log_down", {"alpha": alpha, "beta": beta}, func,
                             (alpha - beta, alpha, alpha - beta, alpha - beta),
                             alpha, None, bim, lambda w_max: np.array([1.0]))


def logcosh(alpha):
    """phi(lam) = (log cosh sqrt(lam))**alpha."""
    _check_unit("alpha", alpha)

    def func(lam):
        return _log_cosh_sqrt(lam) ** alpha

    def bim(s):
        w = np.sqrt(np.asarray(s, dtype=float))
        # cosh sqrt(lam) = prod (1 + lam / ((n - 1/2) pi)^2): each zero passed
        # on the negative axis adds pi to the imaginary part
        n_pass = np.floor(w / np.pi + 0.5)
        with np.errstate(divide="ignore"):
            re = np.log(np.abs(np.cos(w)))
        im = np.pi * n_pass
        return _arg_power_im(np.hypot(re, im), np.arctan2(im, re), alpha)

    def breaks(w_max):
        n = int(w_max / np.pi + 0.5)
        return (np.arange(1, n + 1) - 0.5) * np.pi

    return BernsteinFunction("logcosh", {"alpha": alpha}, func,
                             (alpha / 2, alpha / 2, alpha, alpha), alpha / 2,
                             None, bim, breaks)


def logsinh(alpha):
    """phi(lam) = (log sinh sqrt(lam) - log sqrt(lam))**alpha."""
    _check_unit("alpha", alpha)

    def func(lam):
        return _log_sinh_over(lam) ** alpha

    def bim(s):
        w = np.sqrt(np.asarray(s, dtype=float))
        n_pass = np.floor(w / np.pi)
        ws = np.where(w == 0, 1.0, w)
        with np.errstate(divide="ignore"):
            re = np.where(w == 0, -0.0, np.log(np.abs(np.sin(ws) / ws)))
        im = np.pi * n_pass
        return _arg_power_im(np.hypot(re, im), np.arctan2(im, re), alpha)

    def breaks(w_max):
        n = int(w_max / np.pi)
        return np.arange(1, n + 1) * np.pi

    return BernsteinFunction("logsinh", {"alpha": alpha}, func,
                             (alpha / 2, alpha / 2, alpha, alpha), alpha / 2,
                             None, bim, breaks)


def custom(func, name="custom", levy_density=None, sigma_index=None):
    """Wrap a user supplied Bernstein function.

    Without ``levy_density`` the function can still be used for symbol
    growth checks, but not to build a jump kernel.
    """
    return BernsteinFunction(name, {}, lambda lam: func(lam), None,
                             sigma_index, levy_density, None)


_FACTORIES = {
    "powers": lambda p: powers(p["alphas"]),
    "power_mix": lambda p: power_mix(p["alpha"], p["beta"]),
    "log_up": lambda p: log_up(p["alpha"], p["beta"]),
    "log_down": lambda p: log_down(p["alpha"], p["beta"]),
    "logcosh": lambda p: logcosh(p["alpha"]),
    "logsinh": lambda p: logsinh(p["alpha"]),
}


def from_config(name, params):
    """Build a catalog entry from its identifier and parameter map."""
    try:
        return _FACTORIES[name](params)
    except KeyError as exc:
        raise ValueError(f"unknown Bernstein family or missing parameter: {exc}")
