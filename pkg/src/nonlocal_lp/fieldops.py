"""Periodic grids, the Fourier transform contract and analysis functionals.

The whole space is approximated by the torus ``[-B/2, B/2)^d`` sampled on
``n`` points per axis. Lattice frequencies are ``xi_k = 2 pi k / B`` in
numpy FFT order. Balls used by the local functionals are closed and are
intersected with the fundamental domain (no wrap-around).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .quadrature import gauss_legendre


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[-box/2, box/2)^d`` with ``n`` points per axis."""

    d: int
    n: int
    box: float

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise ValueError(f"dimension d={self.d} not supported")
        if self.n < 8 or self.n & (self.n - 1):
            raise ValueError(f"n={self.n} must be a power of two >= 8")
        if not self.box > 0:
            raise ValueError("box side must be positive")
        object.__setattr__(self, "box", float(self.box))

    @property
    def h(self):
        return self.box / self.n

    @property
    def shape(self):
        return (self.n,) * self.d

    @property
    def cell_volume(self):
        return self.h ** self.d

    def axis(self):
        return -0.5 * self.box + self.h * np.arange(self.n)

    def coords(self):
        """Tuple of ``d`` coordinate arrays, each of shape ``(n,)*d``."""
        ax = self.axis()
        return np.meshgrid(*([ax] * self.d), indexing="ij")

    def points(self):
        """Lattice points as an array of shape ``(n**d, d)`` (row-major)."""
        return np.stack([c.ravel() for c in self.coords()], axis=1)

    def freq_axis(self):
        return 2 * np.pi * np.fft.fftfreq(self.n, d=self.h)

    def frequencies(self):
        """Tuple of ``d`` frequency arrays in FFT order."""
        k = self.freq_axis()
        return np.meshgrid(*([k] * self.d), indexing="ij")

    def freq_norm(self):
        return np.sqrt(sum(f ** 2 for f in self.frequencies()))

    @property
    def key(self):
        return (self.d, self.n, self.box)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples of a field on a :class:`GridSpec`."""

    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.size != self.grid.n ** self.grid.d:
            raise ValueError(f"expected {self.grid.n ** self.grid.d} values, got {v.size}")
        v = v.reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(*coords)`` on the lattice."""
        return cls(grid, func(*grid.coords()))

    def __add__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)


def _same_grid(u, v):
    if u.grid != v.grid:
        raise ValueError(f"grid mismatch: {u.grid} vs {v.grid}")


def _phase(grid):
    # x_0 = -B/2 gives the factor exp(i xi_k B/2) = (-1)^k per axis
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n).astype(int)
    s = np.where(k % 2 == 0, 1.0, -1.0)
    out = s
    for _ in range(grid.d - 1):
        out = np.multiply.outer(out, s)
    return out


def dft(u):
    """Spectrum ``sum_j u(x_j) exp(-i xi_k . x_j) h^d`` in FFT order.

    With this normalisation ``sum |u|^2 h^d = B^-d sum |u_hat|^2``.
    """
    g = u.grid
    return g.cell_volume * _phase(g) * np.fft.fftn(u.values)


def idft(spectrum, grid, check_real=True):
    """Inverse of :func:`dft`; returns a :class:`GridFunction`."""
    spectrum = np.asarray(spectrum)
    if spectrum.shape != grid.shape:
        raise ValueError(f"spectrum shape {spectrum.shape} does not match grid {grid.shape}")
    v = np.fft.ifftn(spectrum * _phase(grid)) / grid.cell_volume
    if check_real:
        scale = max(np.max(np.abs(v.real)), 1e-300)
        if np.max(np.abs(v.imag)) > 1e-8 * scale:
            raise ValueError("inverse transform is not real; spectrum is not Hermitian")
    return GridFunction(grid, v.real)


def top_octave_fraction(u):
    """Share of spectral energy in the top octave ``|k| > n/4`` of any axis."""
    g = u.grid
    spec = np.abs(np.fft.fftn(u.values)) ** 2
    k = np.abs(np.fft.fftfreq(g.n, d=1.0 / g.n))
    mask = np.zeros(g.shape, dtype=bool)
    for ax in range(g.d):
        shape = [1] * g.d
        shape[ax] = g.n
        mask |= (k > g.n / 4).reshape(shape)
    total = spec.sum()
    return float(spec[mask].sum() / total) if total > 0 else 0.0


def band_limited_field(grid, rng, max_mode=None, decay=0.0):
    """Random real field whose spectrum vanishes above ``max_mode``.

    Parameters
    ----------
    grid : GridSpec
    rng : numpy.random.Generator
    max_mode : int, optional
        Largest retained integer mode per axis; default ``n // 8``.
    decay : float
        Amplitudes are damped by ``(1 + |k|)^-decay``.
    """
    max_mode = grid.n // 8 if max_mode is None else int(max_mode)
    spec = np.fft.fftn(rng.standard_normal(grid.shape))
    k = np.fft.fftfreq(grid.n, d=1.0 / grid.n)
    ks = np.meshgrid(*([k] * grid.d), indexing="ij")
    keep = np.all([np.abs(kk) <= max_mode for kk in ks], axis=0)
    # the Nyquist mode has no Hermitian partner; it is never kept
    spec = spec * keep * (1.0 + np.sqrt(sum(kk ** 2 for kk in ks))) ** (-decay)
    return GridFunction(grid, np.fft.ifftn(spec).real)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

def lp_norm(u, p=2.0):
    """``(sum |u|^p h^d)^(1/p)``; ``p = inf`` gives ``max |u|``."""
    p = float(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    a = np.abs(np.asarray(u.values if isinstance(u, GridFunction) else u))
    if np.isinf(p):
        return float(a.max())
    h_d = u.grid.cell_volume
    m = a.max()
    if m == 0:
        return 0.0
    return float(m * (np.sum((a / m) ** p) * h_d) ** (1.0 / p))


def weight_w(grid, R, kernel):
    """``w_R(x) = 1 / (1/j(R) + 1/J(x/2))`` on the lattice."""
    r = np.sqrt(sum(c ** 2 for c in grid.coords()))
    jR = float(kernel(np.array([R]))[0])
    with np.errstate(divide="ignore", over="ignore"):
        inv = 1.0 / kernel(np.where(r > 0, r / 2, 1.0))
    inv = np.where(r > 0, inv, 0.0)
    return 1.0 / (1.0 / jR + inv)


def weighted_l1_norm(u, R, kernel):
    """``sum |u(x_i)| w_R(x_i) h^d``."""
    if R <= 0:
        raise ValueError("R must be positive")
    return float(np.sum(np.abs(u.values) * weight_w(u.grid, R, kernel)) * u.grid.cell_volume)


# ---------------------------------------------------------------------------
# balls
# ---------------------------------------------------------------------------

def _ball_mask(grid, center, radius):
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.d,))
    dist2 = sum((c - x0) ** 2 for c, x0 in zip(grid.coords(), center))
    # lattice distances are compared with a relative tolerance so that
    # points exactly on the sphere belong to the closed ball
    return dist2 <= radius ** 2 * (1 + 1e-12) + 1e-300


def _ball_values(g, center, radius):
    vals = g.values[_ball_mask(g.grid, center, radius)]
    if vals.size == 0:
        raise ValueError("ball contains no lattice points")
    return vals


def ball_average(g, center, radius):
    return float(np.mean(_ball_values(g, center, radius)))


def mean_oscillation(g, center, radius):
    """Ball average of ``|g - (g)_B|``."""
    v = _ball_values(g, center, radius)
    return float(np.mean(np.abs(v - v.mean())))


def osc(g, center, radius):
    """``max - min`` of ``g`` over the ball."""
    v = _ball_values(g, center, radius)
    return float(v.max() - v.min())


def _sorted_by_distance(grid, center):
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.d,))
    dist = np.sqrt(sum((c - x0) ** 2 for c, x0 in zip(grid.coords(), center))).ravel()
    order = np.argsort(dist, kind="stable")
    return dist[order], order


def _radii(grid, dist, radii):
    if radii == "dyadic":
        k = np.arange(int(np.log2(grid.n // 2)) + 1)
        return grid.h * 2.0 ** k
    if radii == "all":
        r = np.unique(np.round(dist / grid.h, 9)) * grid.h
        return r[(r > 0) & (r <= grid.box / 2 + 1e-12)]
    return np.asarray(radii, dtype=float)


def maximal_function(g, x, radii="dyadic", return_radius=False):
    """``sup_r`` of the ball average of ``|g|`` around ``x``.

    ``radii`` is ``"dyadic"`` (``h, 2h, ..., B/2``), ``"all"`` (every
    distinct lattice distance up to ``B/2``, which gives the exact discrete
    supremum) or an explicit sequence.
    """
    dist, order = _sorted_by_distance(g.grid, x)
    a = np.abs(g.values.ravel()[order])
    csum = np.cumsum(a)
    rs = _radii(g.grid, dist, radii)
    idx = np.searchsorted(dist, rs * (1 + 1e-12), side="right")
    idx = np.maximum(idx, 1)
    avgs = csum[idx - 1] / idx
    i = int(np.argmax(avgs))
    return (float(avgs[i]), float(rs[i])) if return_radius else float(avgs[i])


def sharp_function(g, x, radii="dyadic", max_radii=4096):
    """``sup_r`` of the ball average of ``|g - (g)_B|`` around ``x``."""
    dist, order = _sorted_by_distance(g.grid, x)
    v = g.values.ravel()[order]
    rs = _radii(g.grid, dist, radii)
    if rs.size > max_radii:
        raise ValueError(f"{rs.size} radii requested; limit is {max_radii}")
    idx = np.maximum(np.searchsorted(dist, rs * (1 + 1e-12), side="right"), 1)
    best = 0.0
    for m in idx:
        w = v[:m]
        best = max(best, float(np.mean(np.abs(w - w.mean()))))
    return best


def holder_seminorm(u, alpha, center, radius, exhaustive_limit=3000, n_pairs=100_000,
                    seed=0, return_info=False):
    """``max |u(x) - u(y)| / |x - y|^alpha`` over lattice pairs in a ball.

    Exhaustive when the ball holds at most ``exhaustive_limit`` points;
    otherwise ``n_pairs`` seeded random pairs plus all nearest-neighbour
    pairs, in which case the value is a lower bound.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    grid = u.grid
    mask = _ball_mask(grid, center, radius)
    pts = np.stack([c[mask] for c in grid.coords()], axis=1)
    vals = u.values[mask]
    m = vals.size
    if m == 0:
        raise ValueError("ball contains no lattice points")
    if m < 2:
        return (0.0, {"pairs": 0, "exhaustive": True}) if return_info else 0.0
    best = 0.0
    if m <= exhaustive_limit:
        for lo in range(0, m, 512):
            dx = pts[lo:lo + 512, None, :] - pts[None, :, :]
            dist = np.sqrt(np.sum(dx ** 2, axis=-1))
            du = np.abs(vals[lo:lo + 512, None] - vals[None, :])
            with np.errstate(divide="ignore", invalid="ignore"):
                q = np.where(dist > 0, du / dist ** alpha, 0.0)
            best = max(best, float(q.max()))
        info = {"pairs": m * (m - 1) // 2, "exhaustive": True}
    else:
        rng = np.random.default_rng(seed)
        i = rng.integers(0, m, n_pairs)
        j = rng.integers(0, m, n_pairs)
        # nearest neighbours along each axis
        idx = np.flatnonzero(mask.ravel())
        pos = -np.ones(mask.size, dtype=np.int64)
        pos[idx] = np.arange(m)
        flat = np.arange(mask.size).reshape(grid.shape)
        nb_i, nb_j = [], []
        for ax in range(grid.d):
            shifted = np.roll(flat, -1, axis=ax)
            valid = mask & mask.ravel()[shifted]
            edge = [slice(None)] * grid.d
            edge[ax] = -1
            valid[tuple(edge)] = False
            nb_i.append(pos[flat[valid]])
            nb_j.append(pos[shifted[valid]])
        i = np.concatenate([i] + nb_i)
        j = np.concatenate([j] + nb_j)
        dist = np.sqrt(np.sum((pts[i] - pts[j]) ** 2, axis=1))
        keep = dist > 0
        q = np.abs(vals[i] - vals[j])[keep] / dist[keep] ** alpha
        best = float(q.max()) if q.size else 0.0
        info = {"pairs": int(keep.sum()), "exhaustive": False, "seed": seed,
                "note": "sampled pairs: value is a lower bound"}
    return (best, info) if return_info else best


# ---------------------------------------------------------------------------
# cone convexity
# ---------------------------------------------------------------------------

def eta_rule(alpha, eta1, eta2):
    """Left minus right side of the eta selection rule (must be <= 0)."""
    return (alpha - 2) * (1 - 2 * eta1 - eta2) ** 2 + (1 + 2 * eta1) ** 2 - (alpha - 1) / 2


def _cone_nodes(b, eta1, eta2, order=32, n_azimuth=16):
    """Nodes/weights on the double cone around ``b`` (shape (m, d))."""
    b = np.asarray(b, dtype=float)
    d = b.size
    nb = np.linalg.norm(b)
    e = b / nb
    x, w = gauss_legendre(order)
    rho_max = eta1 * nb
    rho = 0.5 * rho_max * (x + 1)
    wr = 0.5 * rho_max * w
    if d == 1:
        z = np.concatenate([rho, -rho])[:, None] * e
        return z, np.concatenate([wr, wr])
    psi0 = np.arccos(1 - eta2)
    psi = 0.5 * psi0 * (x + 1)
    wpsi = 0.5 * psi0 * w
    if d == 2:
        perp = np.array([-e[1], e[0]])
        dirs, dw = [], []
        for lobe in (1.0, -1.0):
            for side in (1.0, -1.0):
                dirs.append(lobe * np.cos(psi)[:, None] * e + side * np.sin(psi)[:, None] * perp)
                dw.append(wpsi)
        dirs = np.concatenate(dirs)
        dw = np.concatenate(dw)
        jac = rho
    else:
        # orthonormal frame around e
        a = np.eye(3)[np.argmin(np.abs(e))]
        p1 = np.cross(e, a)
        p1 /= np.linalg.norm(p1)
        p2 = np.cross(e, p1)
        phi = 2 * np.pi * np.arange(n_azimuth) / n_azimuth
        dirs, dw = [], []
        for lobe in (1.0, -1.0):
            for ph in phi:
                dirs.append(lobe * np.cos(psi)[:, None] * e + np.sin(psi)[:, None]
                            * (np.cos(ph) * p1 + np.sin(ph) * p2))
                dw.append(wpsi * np.sin(psi) * 2 * np.pi / n_azimuth)
        dirs = np.concatenate(dirs)
        dw = np.concatenate(dw)
        jac = rho ** 2
    z = (rho[:, None, None] * dirs[None, :, :]).reshape(-1, d)
    wt = np.outer(wr * jac, dw).ravel()
    return z, wt


def cone_convexity_check(alpha, b, K, eta1, eta2, order=32, tol=1e-6):
    """Both sides of the cone convexity inequality by polar quadrature.

    Parameters
    ----------
    alpha : float in (0, 1)
    b : nonzero vector
    K : callable ``z (m, d) -> K(z) >= 0``, or a nonnegative scalar
    eta1, eta2 : float in (0, 1/4) satisfying the selection rule

    Returns
    -------
    dict with ``lhs``, ``rhs``, ``holds`` and the quadrature description.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if not (0 < eta1 < 0.25 and 0 < eta2 < 0.25):
        raise ValueError("eta1, eta2 must lie in (0, 1/4)")
    if eta_rule(alpha, eta1, eta2) > 0:
        raise ValueError("eta1, eta2 violate the selection rule")
    b = np.atleast_1d(np.asarray(b, dtype=float))
    nb = np.linalg.norm(b)
    if nb == 0:
        raise ValueError("b must be nonzero")
    z, w = _cone_nodes(b, eta1, eta2, order)
    Kz = np.broadcast_to(np.asarray(K(z) if callable(K) else K, dtype=float), w.shape)
    if np.any(Kz < 0):
        raise ValueError("K must be nonnegative")
    bz = z @ b
    zz = np.sum(z * z, axis=1)
    # |b +- 2z|^alpha - |b|^alpha computed without cancellation
    qp = (4 * bz + 4 * zz) / nb ** 2
    qm = (-4 * bz + 4 * zz) / nb ** 2
    second = nb ** alpha * (np.expm1(0.5 * alpha * np.log1p(qp))
                            + np.expm1(0.5 * alpha * np.log1p(qm)))
    lhs = float(np.sum(w * second * Kz))
    rhs = float(-2 ** (alpha - 3) * alpha * (1 - alpha) * nb ** (alpha - 2) * np.sum(w * zz * Kz))
    holds = lhs <= rhs + tol * max(abs(rhs), abs(lhs), 1e-300)
    return {"lhs": lhs, "rhs": rhs, "holds": bool(holds), "gap": rhs - lhs,
            "nodes": int(w.size), "order": order, "tol": tol}
