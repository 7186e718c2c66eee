# %% [markdown]
# # Operators and resolvent solvers
#
# The operator with a measurable coefficient `a(y)` is applied in two
# independent ways: through its full Fourier multiplier, and through
# direct quadrature of the jump integral. The resolvent equation
# `(L - lambda) u = f` is then solved spectrally, by integrating the
# semigroup in time, and pointwise by Monte Carlo.

# %%
import numpy as np

from nonlocal_lp.fieldops import GridSpec, band_limited_field, lp_norm
from nonlocal_lp.kernel import OperatorSpec, constant_coefficient, random_coefficient, stable_kernel
from nonlocal_lp.operator import apply_direct, apply_spectral
from nonlocal_lp.solver import feynman_kac_mc, resolvent_solve, semigroup_solve
from nonlocal_lp.symbol import full_symbol
from nonlocal_lp.verify import BumpField

grid = GridSpec(1, 512, 64.0)
rng = np.random.default_rng(0)

# %% [markdown]
# ## Two pathways
# Random `a` in `[0.5, 2]`, piecewise constant on shells and half-lines.

# %%
for alpha in (0.5, 1.5):
    spec = OperatorSpec(stable_kernel(1, alpha), random_coefficient(1, 0.5, 2.0, seed=1))
    table = full_symbol(spec, grid)
    u = band_limited_field(grid, rng)
    s = apply_spectral(table, u)
    d, info = apply_direct(spec, u, return_info=True)
    print(f"alpha={alpha}: rel. difference {lp_norm(d - s) / lp_norm(s):.2e}, "
          f"Taylor terms {info['taylor_terms']}, far zone {info['far_zone']}")

# %% [markdown]
# ## Resolvent, semigroup and Monte Carlo

# %%
spec = OperatorSpec(stable_kernel(1, 1.5), random_coefficient(1, 0.5, 2.0, seed=2), "Ltilde")
f = band_limited_field(grid, rng)
u = resolvent_solve(full_symbol(spec, grid), f, 1.0)
v = semigroup_solve(full_symbol(spec.with_variant("Phi"), grid), f, 1.0)
print("residual", u.residual, " semigroup vs resolvent",
      lp_norm(u.u - v.u) / lp_norm(u.u))

# %%
bump = BumpField(np.array([[0.0]]), np.array([1.0]), np.array([1.0]))
flat = OperatorSpec(stable_kernel(1, 1.0), constant_coefficient(1))
ref = resolvent_solve(full_symbol(flat, grid), bump.on(grid), 1.0).u
idx = np.array([240, 256, 272])
mc = feynman_kac_mc(1.0, 1, bump, 1.0, grid.axis()[idx][:, None], paths=100_000,
                    period=grid.box)
for x, e, s, r in zip(grid.axis()[idx], mc.diagnostics["estimate"], mc.diagnostics["stderr"],
                      ref.values[idx]):
    print(f"x={x:+.2f}  MC {e:.5f} +- {s:.5f}   spectral {r:.5f}")
