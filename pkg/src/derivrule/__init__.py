"""Gauss quadrature, Stieltjes inversion by the derivative rule, and related diagnostics."""
from .errors import *  # noqa: F401,F403
from .numerics import PrecisionContext, SymTridiagonal, eigen_dense_symmetric, eigen_tridiagonal
from .opsystems import (OPSystem, chebyshev, coulomb_pollaczek, favard_check, gegenbauer, hermite,
                        laguerre, legendre, parse_system, recurrence, weight)
from .quadrature import (QuadratureRule, analytic_chebyshev_rule, equivalent_weights, gauss_rule,
                         integrate)
from .interpolation import InterpolationScheme, derivative_at, thiele_derivative
from .inversion import InversionReport, derivative_rule_invert, fit_convergence, histogram_invert
from .universality import clock_probe, pollaczek_missing_mass, weight_ratio_probe
from .markov import ResolventApproximant, continued_fraction, pole_sum
from .photoeffect import DiscretizedSpectrum, cross_section, exact_cross_section, hamiltonian_matrix

__version__ = "0.1.0"
