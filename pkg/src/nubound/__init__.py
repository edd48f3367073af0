"""Bound states of inverse-power radial potentials.

Closed-form eigenvalues and eigenfunctions via the Nikiforov-Uvarov
reduction, together with an independent finite-difference eigensolver that
certifies every closed-form result (``nubound.oracle``, imported on demand
because it carries compiled kernels).
"""

from .nu_engine import (
    ClosedFormFactor,
    LowPoly,
    NUBranch,
    NUProblem,
    QuantizationEquation,
    branches,
    k_candidates,
    lambda_n,
    phi_factor,
    quantize,
    rho_weight,
    sigma_bar,
)
from .polycubic import CubicRoots, DepressedCubic, RealCubic, cardano_roots, depress, quadratic_roots
from .potential import (
    ExpansionTriple,
    InversePolyPotential,
    LandscapeReport,
    auto_r0,
    evaluate,
    expansion_coeffs,
    landscape,
    preset,
)
from .specfun import LaguerreOrder, integrate, laguerre, rodrigues_check
from .spectrum import EigenState, eigenfunction, eigenvalue, node_count, solve_spectrum

__version__ = "0.1.0"

__all__ = [
    "ClosedFormFactor",
    "CubicRoots",
    "DepressedCubic",
    "EigenState",
    "ExpansionTriple",
    "InversePolyPotential",
    "LaguerreOrder",
    "LandscapeReport",
    "LowPoly",
    "NUBranch",
    "NUProblem",
    "QuantizationEquation",
    "RealCubic",
    "auto_r0",
    "branches",
    "cardano_roots",
    "depress",
    "eigenfunction",
    "eigenvalue",
    "evaluate",
    "expansion_coeffs",
    "integrate",
    "k_candidates",
    "laguerre",
    "lambda_n",
    "landscape",
    "node_count",
    "phi_factor",
    "preset",
    "quadratic_roots",
    "quantize",
    "rho_weight",
    "rodrigues_check",
    "sigma_bar",
    "solve_spectrum",
    "__version__",
]
