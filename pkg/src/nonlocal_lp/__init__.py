"""L_p theory toolkit for non-local operators with measurable coefficients.

Radial jump kernels, hypothesis certificates, Fourier symbols, periodic
grid analysis, two independent operator pathways, resolvent solvers and
verification suites for a priori estimates.
"""
from .bernstein import BernsteinFunction
from .config import ConfigError, RunConfig
from .fieldops import GridFunction, GridSpec, dft, idft, lp_norm
from .hypothesis import HypothesisCertificate, certify
from .kernel import (CoefficientField, OperatorSpec, RadialJumpKernel, constant_coefficient,
                     drift_vector, random_coefficient, stable_kernel, subordinate_kernel)
from .operator import apply_direct, apply_spectral
from .solver import SolveResult, feynman_kac_mc, resolvent_solve, semigroup_solve
from .symbol import CertificateError, SymbolTable, full_symbol, psi
from .verify import SUITES, VerificationReport

__version__ = "0.1.0"

__all__ = [
    "BernsteinFunction", "ConfigError", "RunConfig", "GridFunction", "GridSpec", "dft", "idft",
    "lp_norm", "HypothesisCertificate", "certify", "CoefficientField", "OperatorSpec",
    "RadialJumpKernel", "constant_coefficient", "drift_vector", "random_coefficient",
    "stable_kernel", "subordinate_kernel", "apply_direct", "apply_spectral", "SolveResult",
    "feynman_kac_mc", "resolvent_solve", "semigroup_solve", "CertificateError", "SymbolTable",
    "full_symbol", "psi", "SUITES", "VerificationReport",
]
