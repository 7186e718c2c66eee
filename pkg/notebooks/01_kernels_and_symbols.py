# %% [markdown]
# # Jump kernels, certificates and symbols
#
# A radial jump kernel `j` defines the operator through its Levy measure.
# Before a kernel is used, the certifiers check integrability, the order
# `sigma` and the scaling hypotheses. The symbol `Psi` of the isotropic
# operator is then computed by radial quadrature.

# %%
import numpy as np

from nonlocal_lp import bernstein as bern
from nonlocal_lp.hypothesis import certify, check_H2
from nonlocal_lp.kernel import (OperatorSpec, constant_coefficient, custom_kernel, stable_kernel,
                                subordinate_kernel)
from nonlocal_lp.symbol import psi

# %% [markdown]
# ## Stable kernels
# The normalised stable density has symbol exactly `|xi|^alpha`.

# %%
xi = np.array([0.5, 1.0, 2.0, 4.0])
for alpha in (0.5, 1.0, 1.5):
    k = stable_kernel(1, alpha)
    print(f"alpha={alpha}: j(1)={float(k(1.0)):.6f}  Psi/|xi|^a - 1 =",
          np.array2string(psi(k, xi) / xi ** alpha - 1, precision=2))

# %% [markdown]
# ## Certificates
# Each check returns a verdict with its fitted constants.

# %%
spec = OperatorSpec(stable_kernel(1, 0.5), constant_coefficient(1))
for cert in certify(spec):
    print(f"{cert.hypothesis:8s} {cert.verdict:5s} {cert.constants}")

# %% [markdown]
# A kernel with an exponential tail decays too fast for the moment
# domination condition: the moment ratio grows without bound in `t`.

# %%
tail = custom_kernel(1, lambda r: r ** -2.0 * np.exp(-r), lambda r: -2.0 * np.log(r) - r,
                     None, "exp_tail")
print(check_H2(tail))

# %% [markdown]
# ## Subordinate kernels
# For Brownian motion subordinated by a Bernstein function `phi`, the
# symbol is `phi(|xi|^2)`; the density is tabulated from the subordinator.

# %%
for phi in (bern.powers([0.5]), bern.logcosh(0.5), bern.power_mix(0.5, 0.5)):
    k = subordinate_kernel(phi, 1)
    err = np.max(np.abs(psi(k, xi) / phi(xi ** 2) - 1))
    print(f"{phi.name:10s} sigma={k.sigma}  max |Psi/phi(xi^2) - 1| = {err:.1e}")
