"""Radial jump kernels, measurable coefficients and operator specifications.

A translation-invariant operator of the package is described by

* a radial density ``j`` with ``J(y) = j(|y|)`` (:class:`RadialJumpKernel`),
* a bounded measurable coefficient ``a`` with ``nu <= a <= Lambda``
  (:class:`CoefficientField`),
* a variant (``L``, ``Ltilde``, ``A``, adjoints, ``Phi``) and the order
  ``sigma`` that fixes the gradient compensator (:class:`OperatorSpec`).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import kve

from . import bernstein as bern
from .quadrature import panel_nodes, sphere_rule
from .radial import QuadratureError, angular_reduce, oscillatory_shell, radial_integral

SUPPORTED_DIMS = (1, 2, 3)
SIGMA_ONE_TOL = 1e-12


def _check_dim(d):
    if d not in SUPPORTED_DIMS:
        raise ValueError(f"dimension d={d} not supported (expected 1, 2 or 3)")


# ---------------------------------------------------------------------------
# radial kernels
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RadialJumpKernel:
    """Radial jump density ``j`` on (0, inf) in dimension ``d``.

    Attributes
    ----------
    d : int
        Space dimension.
    func : callable
        Vectorised ``r -> j(r)``.
    logfunc : callable, optional
        Vectorised ``r -> log j(r)``; used by sweeps that would underflow.
    sigma : float, optional
        Analytic order of the kernel when known.
    family : str
        ``"stable"``, ``"subordinate"`` or ``"custom"``.
    alpha : float, optional
        Stable exponent (``family == "stable"`` only).
    symbol : callable, optional
        Closed form ``rho -> Psi(rho)`` of the radial symbol when known.
    """

    d: int
    func: Callable
    logfunc: Optional[Callable] = None
    sigma: Optional[float] = None
    family: str = "custom"
    alpha: Optional[float] = None
    symbol: Optional[Callable] = field(default=None, repr=False)
    bernstein: Optional[bern.BernsteinFunction] = field(default=None, repr=False)
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    def log(self, r):
        r = np.asarray(r, dtype=float)
        if self.logfunc is not None:
            return self.logfunc(r)
        with np.errstate(divide="ignore"):
            return np.log(self.func(r))

    def J(self, y):
        """Density at points ``y`` of shape (..., d)."""
        y = np.asarray(y, dtype=float)
        return self(np.linalg.norm(y, axis=-1))

    @property
    def label(self):
        """Readable identifier such as ``stable(alpha=0.5)``."""
        args = ", ".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        if self.family == "stable" and not args:
            args = f"alpha={self.alpha}"
        return f"{self.name}({args})" if args else self.name

    @property
    def key(self):
        if self.family == "custom":
            return ("custom", self.d, id(self))
        return (self.family, self.d, self.name,
                tuple(sorted((k, tuple(v) if isinstance(v, (list, tuple)) else v)
                             for k, v in self.params.items())))

    def __hash__(self):
        return hash(self.key)

    def __eq__(self, other):
        return isinstance(other, RadialJumpKernel) and self.key == other.key


def custom_kernel(d, func, logfunc=None, sigma=None, name="custom"):
    """Wrap a user supplied radial density."""
    _check_dim(d)
    return RadialJumpKernel(d, func, logfunc, sigma, "custom", None, None, None, name, {})


@lru_cache(maxsize=None)
def stable_normalization(d, alpha):
    """Constant ``c`` with ``int (1 - cos y_1) c |y|^(-d-alpha) dy = 1``.

    The radial integral is done by the oscillatory radial quadrature; for
    d >= 2 the exact homogeneity of ``|y|^(-d-alpha)`` reduces the
    remaining sphere integral to ``int |theta_1|^alpha``, evaluated with the
    same angular reduction as the symbol.

    Raises
    ------
    QuadratureError
        If a quadrature misses its tolerance.
    """
    _check_dim(d)
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} must lie in (0, 2)")
    c1, _ = oscillatory_shell(lambda r: r ** (-1.0 - alpha), 0.0, np.inf, np.array([1.0]))
    radial = float(c1[0])
    total = angular_reduce(lambda w: radial * np.abs(w) ** alpha, 1.0, d)
    if not np.isfinite(total) or total <= 0:
        raise QuadratureError(f"stable normalization failed for d={d}, alpha={alpha}")
    return 1.0 / total


def stable_kernel(d, alpha):
    """Normalised isotropic stable density ``c(d, alpha) r^(-d-alpha)``.

    The normalisation makes the symbol exactly ``|xi|^alpha``.

    Examples
    --------
    >>> k = stable_kernel(1, 1.0)
    >>> round(float(k(1.0)) * np.pi, 10)
    1.0
    """
    _check_dim(d)
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha={alpha} must lie in (0, 2)")
    c = stable_normalization(d, alpha)
    logc = np.log(c)
    p = d + alpha
    return RadialJumpKernel(
        d,
        func=lambda r: c * r ** (-p),
        logfunc=lambda r: logc - p * np.log(r),
        sigma=alpha,
        family="stable",
        alpha=alpha,
        symbol=lambda rho: np.abs(rho) ** alpha,
        name="stable",
        params={"alpha": alpha},
    )


# --- subordinate kernels -----------------------------------------------------

TABLE_POINTS_PER_DECADE = 24


def _heat_integral_levy(density, d, r):
    """``int (4 pi t)^(-d/2) exp(-r^2/4t) rho(t) dt`` with ``t = r^2 e^v``.

    The integrand in ``v`` decays doubly exponentially on the left and
    exponentially on the right, so the trapezoid rule converges
    geometrically.
    """
    v = np.arange(-7.0, 80.0, 0.02)
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        t = ri * ri * np.exp(v)
        vals = (4 * np.pi * t) ** (-d / 2) * np.exp(-0.25 * np.exp(-v)) * density(t) * t
        out[i] = 0.02 * np.sum(vals)
    return out


def _green_factor(d, r, w):
    """``int_0^inf (4 pi t)^(-d/2) exp(-r^2/4t - w^2 t) dt``."""
    nu = 1.0 - d / 2.0
    z = r * w
    if d == 1:
        return np.exp(-z) / (2.0 * w)
    if d == 3:
        return np.exp(-z) / (4.0 * np.pi * r)
    return (4 * np.pi) ** (-d / 2) * 2.0 * (r / (2.0 * w)) ** nu * kve(nu, z) * np.exp(-z)


def _graded_nodes(points, levels=8, order=8):
    """GL nodes between consecutive ``points`` graded towards both ends."""
    pts = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        L = b - a
        fr = 0.5 ** np.arange(levels, 0, -1)
        inner = np.concatenate([a + 0.5 * L * fr, [a + 0.5 * L], b - 0.5 * L * fr[::-1]])
        pts.extend(inner.tolist())
        pts.append(b)
    return panel_nodes(np.unique(pts), order=order)


def _heat_integral_boundary(phi, d, r, w_cut=60.0):
    """Jump density from the boundary values of a complete Bernstein ``phi``.

    With ``mu(t) = (1/pi) int exp(-t s) Im phi(-s+i0) ds`` and ``s = w^2``::

        j(r) = (2/pi) int_0^inf Im phi(-w^2 + i0) G_d(r, w) w dw

    where ``G_d`` is the Laplace transform of the heat kernel in ``t``.
    """
    w_max = w_cut / r.min()
    sing = np.array([]) if phi.breakpoints is None else phi.breakpoints(w_max)
    sing = sing[(sing > 0) & (sing < w_max)]
    w_lo = 1e-14
    geo = np.geomspace(w_lo, w_max, int(8 * np.log10(w_max / w_lo)) + 1)
    if sing.size:
        # geometric spacing away from the singular set, graded panels between
        # consecutive singular points
        first, last = sing[0], sing[-1]
        left = geo[geo < first / 2]
        right = geo[geo > last + np.pi]
        nodes_l, wts_l = panel_nodes(np.concatenate([left, [first / 2]]))
        mid_pts = np.concatenate([[first / 2], sing, [last + np.pi]])
        nodes_m, wts_m = _graded_nodes(mid_pts)
        nodes_r, wts_r = panel_nodes(np.concatenate([[last + np.pi], right]))
        nodes = np.concatenate([nodes_l, nodes_m, nodes_r])
        wts = np.concatenate([wts_l, wts_m, wts_r])
    else:
        nodes, wts = panel_nodes(geo)
    weight = wts * phi.boundary_im(nodes * nodes) * nodes * (2.0 / np.pi)
    out = np.empty_like(r)
    for i, ri in enumerate(r):
        m = np.searchsorted(nodes, w_cut / ri)
        out[i] = np.dot(weight[:m], _green_factor(d, ri, nodes[:m]))
    return out


def _tabulated(logr, logj):
    spline = CubicSpline(logr, logj)
    lo_slope = (logj[1] - logj[0]) / (logr[1] - logr[0])
    hi_slope = (logj[-1] - logj[-2]) / (logr[-1] - logr[-2])
    a, b = logr[0], logr[-1]

    def logfunc(r):
        x = np.log(np.asarray(r, dtype=float))
        xc = np.clip(x, a, b)
        y = spline(xc)
        y = np.where(x < a, logj[0] + lo_slope * (x - a), y)
        return np.where(x > b, logj[-1] + hi_slope * (x - b), y)

    return logfunc


_TABLES: dict = {}


def _subordinate_table(phi_key, phi, d):
    if (phi_key, d) in _TABLES:
        return _TABLES[phi_key, d]
    if phi.name in ("logcosh", "logsinh"):
        r_lo, r_hi = 1e-3, 1e3
    else:
        r_lo, r_hi = 1e-6, 1e6
    n = int(round(np.log10(r_hi / r_lo) * TABLE_POINTS_PER_DECADE)) + 1
    r = np.geomspace(r_lo, r_hi, n)
    if phi.levy_density is not None:
        j = _heat_integral_levy(phi.levy_density, d, r)
    else:
        j = _heat_integral_boundary(phi, d, r)
    if np.any(~np.isfinite(j)) or np.any(j <= 0):
        raise QuadratureError(f"subordinate kernel table for {phi.name} is not positive")
    _TABLES[phi_key, d] = (np.log(r), np.log(j))
    return _TABLES[phi_key, d]


def subordinate_kernel(phi, d):
    """Jump density of Brownian motion subordinated by ``phi``.

    ``j(r) = int (4 pi t)^(-d/2) exp(-r^2/(4t)) mu(dt)``; the symbol is
    ``Psi(xi) = phi(|xi|^2)``. The density is tabulated once per
    ``(phi, d)`` on a logarithmic radius grid and interpolated in log-log
    coordinates, with power-law extrapolation outside the table.

    Parameters
    ----------
    phi : BernsteinFunction
        A catalog entry, or a custom entry carrying ``levy_density``.
    d : int
        Space dimension.

    Raises
    ------
    NotImplementedError
        If ``phi`` has neither a Levy density nor boundary data.
    """
    _check_dim(d)
    if phi.levy_density is None and phi.boundary_im is None:
        raise NotImplementedError(
            f"Bernstein function '{phi.name}' has no subordinator density; "
            "numerical Laplace inversion is not supported")
    key = phi.key if phi.name != "custom" else ("custom", id(phi))
    logr, logj = _subordinate_table(key, phi, d)
    logfunc = _tabulated(logr, logj)
    sigma = None if phi.sigma_index is None else 2.0 * phi.sigma_index
    return RadialJumpKernel(
        d,
        func=lambda r: np.exp(logfunc(r)),
        logfunc=logfunc,
        sigma=sigma,
        family="subordinate",
        symbol=lambda rho: phi(np.asarray(rho, dtype=float) ** 2),
        bernstein=phi,
        name=phi.name,
        params=dict(phi.params),
    )


def kernel_from_config(cfg, d):
    """Build a kernel from ``{"family": ..., ...params}``."""
    fam = cfg.get("family")
    if fam == "stable":
        return stable_kernel(d, float(cfg["alpha"]))
    if fam == "subordinate":
        params = {k: v for k, v in cfg.items() if k not in ("family", "phi")}
        return subordinate_kernel(bern.from_config(cfg["phi"], params), d)
    if fam == "exp_tail":
        s = float(cfg.get("exponent", 1.0))
        return custom_kernel(d, lambda r: r ** (-d - s) * np.exp(-r),
                             lambda r: (-d - s) * np.log(r) - r, None, "exp_tail")
    raise ValueError(f"unknown kernel family '{fam}'")


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------

DEFAULT_EDGES = (0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, np.inf)


def _sector_count(d, n_sectors):
    if d == 1:
        return 2
    if n_sectors % 2:
        raise ValueError("number of angular sectors must be even")
    if d == 3 and (n_sectors // 2) % 2:
        raise ValueError("d=3 needs an even number of azimuth sectors per hemisphere")
    return n_sectors


def sector_index(dirs, n_sectors):
    """Sector of each direction in ``dirs`` (shape (m, d)).

    d=1: 0 for positive, 1 for negative. d=2: equal angular sectors
    starting at angle 0. d=3: azimuth sectors on the upper hemisphere,
    then the lower hemisphere. The antipode of sector ``s`` is
    ``(s + n_sectors/2) mod n_sectors`` in d=1, 2 and the matching azimuth
    in the opposite hemisphere in d=3.
    """
    dirs = np.atleast_2d(dirs)
    d = dirs.shape[1]
    if n_sectors == 1:
        return np.zeros(dirs.shape[0], dtype=int)
    if d == 1:
        return (dirs[:, 0] < 0).astype(int)
    theta = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), 2 * np.pi)
    if d == 2:
        return np.minimum((theta / (2 * np.pi / n_sectors)).astype(int), n_sectors - 1)
    n_az = n_sectors // 2
    k = np.minimum((theta / (2 * np.pi / n_az)).astype(int), n_az - 1)
    lower = (dirs[:, 2] < 0) | ((dirs[:, 2] == 0) & (theta >= np.pi))
    return k + n_az * lower.astype(int)


def antipodal_sector(s, n_sectors, d):
    if n_sectors == 1:
        return s
    if d in (1, 2):
        return (s + n_sectors // 2) % n_sectors
    n_az = n_sectors // 2
    h, k = divmod(s, n_az)
    return (1 - h) * n_az + (k + n_az // 2) % n_az


@dataclass(frozen=True, eq=False)
class CoefficientField:
    """Measurable coefficient ``a(y)`` with ``nu <= a <= Lambda``.

    Either piecewise constant on radial shells x angular sectors
    (``values`` of shape (shells, sectors)) or given by ``func``.

    Attributes
    ----------
    d : int
    nu, Lambda : float
        Ellipticity bounds.
    edges : tuple of float
        Radial shell edges from 0 to inf; always contains 1.
    values : ndarray, optional
        Cell values.
    func : callable, optional
        ``y (m, d) -> a(y)``.
    even_inside, even_outside : bool
        ``a(y) = a(-y)`` for ``|y| < 1`` resp. ``|y| >= 1``.
    seed : int, optional
        Seed used to draw ``values``.
    """

    d: int
    nu: float
    Lambda: float
    edges: tuple = DEFAULT_EDGES
    values: Optional[np.ndarray] = None
    func: Optional[Callable] = field(default=None, repr=False)
    even_inside: bool = False
    even_outside: bool = False
    seed: Optional[int] = None
    name: str = "piecewise"
    reflect: bool = False

    def __post_init__(self):
        _check_dim(self.d)
        if not 0 < self.nu <= self.Lambda:
            raise ValueError(f"need 0 < nu <= Lambda, got nu={self.nu}, Lambda={self.Lambda}")
        if (self.values is None) == (self.func is None):
            raise ValueError("give exactly one of values or func")
        edges = tuple(float(e) for e in self.edges)
        if edges[0] != 0.0 or not np.isinf(edges[-1]) or 1.0 not in edges:
            raise ValueError("radial edges must start at 0, end at inf and contain 1")
        object.__setattr__(self, "edges", edges)
        if self.values is not None:
            v = np.array(self.values, dtype=float, copy=True)
            if v.ndim != 2 or v.shape[0] != len(edges) - 1:
                raise ValueError("values must have shape (shells, sectors)")
            if v.min() < self.nu or v.max() > self.Lambda:
                raise ValueError("coefficient values violate nu <= a <= Lambda")
            v.setflags(write=False)
            object.__setattr__(self, "values", v)

    # -- structure -------------------------------------------------------
    @property
    def n_sectors(self):
        return 1 if self.values is None else self.values.shape[1]

    @property
    def fully_even(self):
        return self.even_inside and self.even_outside

    @property
    def is_constant(self):
        return self.values is not None and np.all(self.values == self.values.flat[0])

    @property
    def key(self):
        if self.values is None:
            return ("func", self.d, id(self.func), self.reflect)
        return ("cells", self.d, self.edges, self.values.tobytes(), self.values.shape)

    def shell_index(self, r):
        return np.searchsorted(np.asarray(self.edges), r, side="right") - 1

    def reflected(self):
        """The coefficient ``y -> a(-y)``."""
        if self.values is None:
            return replace(self, reflect=not self.reflect)
        S = self.n_sectors
        perm = [antipodal_sector(s, S, self.d) for s in range(S)]
        return replace(self, values=self.values[:, perm])

    # -- evaluation -------------------------------------------------------
    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        shape = y.shape[:-1]
        y2 = y.reshape(-1, self.d)
        if self.values is None:
            out = np.asarray(self.func(-y2 if self.reflect else y2), dtype=float)
            return np.broadcast_to(out, y2.shape[:1]).reshape(shape)
        r = np.linalg.norm(y2, axis=1)
        k = np.clip(self.shell_index(r), 0, len(self.edges) - 2)
        with np.errstate(invalid="ignore", divide="ignore"):
            dirs = y2 / np.where(r > 0, r, 1.0)[:, None]
        s = sector_index(dirs, self.n_sectors)
        return self.values[k, s].reshape(shape)

    def on_sphere(self, r, dirs):
        """Values at radius ``r`` (scalar) along unit directions ``dirs``."""
        return self(r * np.atleast_2d(dirs))

    def representative_radius(self, k):
        lo, hi = self.edges[k], self.edges[k + 1]
        if lo == 0.0:
            return 0.5 * hi
        if np.isinf(hi):
            return 2.0 * lo
        return np.sqrt(lo * hi)


def constant_coefficient(d, value=1.0):
    return CoefficientField(d, value, value, values=np.full((len(DEFAULT_EDGES) - 1, 1), value),
                            even_inside=True, even_outside=True, name="constant")


def random_coefficient(d, nu, Lambda, seed, edges=DEFAULT_EDGES, n_sectors=None,
                       even_inside=False, even_outside=False):
    """Seeded piecewise-constant coefficient, uniform on [nu, Lambda] per cell.

    Evenness flags are enforced exactly by copying each flagged cell to its
    antipodal cell.
    """
    _check_dim(d)
    edges = tuple(sorted(set(float(e) for e in edges) | {1.0}))
    S = _sector_count(d, n_sectors or {1: 2, 2: 8, 3: 8}[d])
    rng = np.random.default_rng(seed)
    vals = rng.uniform(nu, Lambda, size=(len(edges) - 1, S))
    for k in range(len(edges) - 1):
        inside = edges[k + 1] <= 1.0
        if (inside and even_inside) or (not inside and even_outside):
            for s in range(S):
                t = antipodal_sector(s, S, d)
                if t > s:
                    vals[k, t] = vals[k, s]
    return CoefficientField(d, nu, Lambda, edges, vals, None, even_inside, even_outside,
                            seed, "random")


def function_coefficient(d, func, nu, Lambda, even_inside=False, even_outside=False,
                         name="function", check_samples=4096, seed=0):
    """Coefficient given by a vectorised function of ``y`` (shape (m, d)).

    Bounds are checked on ``check_samples`` seeded points.
    """
    c = CoefficientField(d, nu, Lambda, DEFAULT_EDGES, None, func, even_inside,
                         even_outside, None, name)
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((check_samples, d)) * np.exp(rng.uniform(-6, 6, (check_samples, 1)))
    v = c(y)
    if v.min() < nu - 1e-12 or v.max() > Lambda + 1e-12:
        raise ValueError("coefficient function violates nu <= a <= Lambda on samples")
    return c


def coefficient_from_config(cfg, d):
    fam = cfg.get("family", "constant")
    if fam == "constant":
        return constant_coefficient(d, float(cfg.get("value", 1.0)))
    if fam == "random":
        return random_coefficient(
            d, float(cfg["nu"]), float(cfg["Lambda"]), int(cfg.get("seed", 0)),
            tuple(cfg.get("edges", DEFAULT_EDGES)), cfg.get("n_sectors"),
            bool(cfg.get("even_inside", cfg.get("even", False))),
            bool(cfg.get("even_outside", cfg.get("even", False))))
    raise ValueError(f"unknown coefficient family '{fam}'")


# ---------------------------------------------------------------------------
# operator specification
# ---------------------------------------------------------------------------

VARIANTS = ("L", "Ltilde", "A", "Lstar", "Ltilde_star", "Phi")
_ALIASES = {"L-tilde": "Ltilde", "L-star": "Lstar", "L-tilde-star": "Ltilde_star",
            "Ltilde-star": "Ltilde_star"}


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Kernel, coefficient, variant and order of a non-local operator.

    ``Phi`` denotes the operator whose multiplier is ``-Phi``: reflected
    kernel ``a(-y) J(y)`` compensated on the unit ball.
    """

    kernel: RadialJumpKernel
    coefficient: CoefficientField
    variant: str = "L"
    sigma: Optional[float] = None

    def __post_init__(self):
        v = _ALIASES.get(self.variant, self.variant)
        if v not in VARIANTS:
            raise ValueError(f"unknown variant '{self.variant}'")
        object.__setattr__(self, "variant", v)
        if self.kernel.d != self.coefficient.d:
            raise ValueError("kernel and coefficient dimensions differ")
        if v == "A" and not (self.coefficient.is_constant and self.coefficient.nu == 1.0
                             and self.coefficient.Lambda == 1.0):
            object.__setattr__(self, "coefficient", constant_coefficient(self.kernel.d))
        if self.sigma is None:
            s = self.kernel.sigma
            if s is None:
                from .hypothesis import estimate_sigma
                s = estimate_sigma(self.kernel).constants["sigma"]
            object.__setattr__(self, "sigma", float(s))

    @property
    def d(self):
        return self.kernel.d

    @property
    def chi_regime(self):
        if abs(self.sigma - 1.0) <= SIGMA_ONE_TOL:
            return "unit-ball"
        return "none" if self.sigma < 1.0 else "full"

    @property
    def compensator_radius(self):
        """Radius ``R`` with ``chi = 1_{|y| < R}`` for this variant."""
        if self.variant in ("Ltilde", "Ltilde_star", "Phi"):
            return 1.0
        return {"none": 0.0, "unit-ball": 1.0, "full": np.inf}[self.chi_regime]

    @property
    def effective_coefficient(self):
        if self.variant in ("Lstar", "Ltilde_star", "Phi"):
            return self.coefficient.reflected()
        return self.coefficient

    def with_variant(self, variant):
        return OperatorSpec(self.kernel, self.coefficient, variant, self.sigma)

    @property
    def key(self):
        return (self.kernel.key, self.effective_coefficient.key, self.compensator_radius)

    def K(self, y):
        """Kernel ``a(y) J(y)`` of this variant at points ``y`` (..., d)."""
        return self.effective_coefficient(y) * self.kernel.J(y)


def kernel_split(spec):
    """Split ``K = K1 + K2`` with ``K1(z) = min(K(z), K(-z))``.

    Returns
    -------
    (K1, K2) : tuple of callables on points of shape (..., d)
    """
    if spec.variant not in ("L", "Ltilde"):
        raise ValueError("kernel_split needs variant L or Ltilde")

    def K1(z):
        z = np.asarray(z, dtype=float)
        return np.minimum(spec.K(z), spec.K(-z))

    def K2(z):
        z = np.asarray(z, dtype=float)
        return spec.K(z) - K1(z)

    return K1, K2


def _first_moment_integrand(spec, component):
    """``r -> r * j(r) r^(d-1) int_S theta_i a(r theta) dtheta``."""
    d = spec.d
    coef = spec.coefficient
    dirs, w = sphere_rule(d, coef.n_sectors, total=256)
    wi = w * dirs[:, component]

    def f(r):
        r = np.atleast_1d(r)
        pts = r[:, None, None] * dirs[None, :, :]
        ang = coef(pts) @ wi
        return r ** d * spec.kernel(r) * ang

    return f


def drift_vector(spec):
    """Drift ``b`` with ``Ltilde u = L u + b . grad u``.

    ``b = -int_{B_1} y a J`` when sigma < 1 and ``b = int_{|y|>1} y a J``
    when sigma > 1.

    Raises
    ------
    ValueError
        If sigma = 1 (both operators already compensate on the unit ball).
    QuadratureError
        If the moment integral diverges or misses its tolerance.
    """
    regime = spec.chi_regime
    if regime == "unit-ball":
        raise ValueError("drift vector is undefined for sigma = 1")
    coef = spec.coefficient
    if regime == "none" and coef.even_inside or regime == "full" and coef.even_outside:
        return np.zeros(spec.d)
    b = np.zeros(spec.d)
    extra = tuple(e for e in coef.edges if 0 < e < np.inf)
    for i in range(spec.d):
        f = _first_moment_integrand(spec, i)
        if regime == "none":
            b[i] = -radial_integral(f, 0.0, 1.0, extra=extra)
        else:
            b[i] = radial_integral(f, 1.0, np.inf, extra=extra)
    return b
