"""Desk-scale construction of the N-dependent equilibrium measure of a
log-gas confined by a dressed-cosh potential with periodic pair kernel.

The package solves, end to end, the chain

    TBA pseudo-energy  ->  confining potential  ->  plus/minus kernel
    factorization  ->  leading Riemann-Hilbert parametrix  ->  support
    endpoints  ->  equilibrium density, moments and variational checks,

and cross-validates the analytic route against brute-force oracles
(direct energy minimization over discretized probability measures, and
direct quadrature of the few-particle partition integral).
"""

from .equilibrium import (Density, FirstMomentAsymptotic, Support,
                          constraint_J, density, effective_potential,
                          endpoints_asymptotic, first_moment,
                          first_moment_asymptotic, mass, singular_residual,
                          solve_endpoints)
from .model import ModelParams, derive_scales
from .oracle import (DiscreteMeasure, minimize_energy, oracle_endpoints,
                     z_small_n)
from .tba import TBASolution, solve_tba
from .wiener_hopf import WHFactorSet, make_factors

__all__ = [
    "ModelParams",
    "derive_scales",
    "TBASolution",
    "solve_tba",
    "WHFactorSet",
    "make_factors",
    "Support",
    "solve_endpoints",
    "endpoints_asymptotic",
    "constraint_J",
    "Density",
    "density",
    "mass",
    "first_moment",
    "first_moment_asymptotic",
    "FirstMomentAsymptotic",
    "effective_potential",
    "singular_residual",
    "DiscreteMeasure",
    "minimize_energy",
    "oracle_endpoints",
    "z_small_n",
]

__version__ = "0.1.0"
