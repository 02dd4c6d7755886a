"""
Enums for specdisp.
"""
from enum import Enum


class DispersionVariant(Enum):
    """Energy laws a Fourier mode can follow."""
    SCHRODINGER = "schrodinger"
    RELATIVISTIC = "relativistic"
    KLEIN_GORDON = "klein_gordon"


class LambertDirection(Enum):
    """Directions of the Taylor/Lambert coefficient conversion."""
    TAYLOR_TO_LAMBERT = "taylor_to_lambert"
    LAMBERT_TO_TAYLOR = "lambert_to_taylor"


class ScenarioMode(Enum):
    """Top-level scenario kinds."""
    DISPERSION = "dispersion"
    HILL = "hill"
    VERIFY = "verify"


class SolverMethod(Enum):
    """Solvers available to hill scenarios."""
    RECURRENCE = "recurrence"
    GAMMA = "gamma"
    PRODUCT = "product"
    NESTED = "nested"
    ITERATED = "iterated"


class CoefficientMethod(Enum):
    """Ways to obtain the A_n coefficients."""
    CLOSED = "closed"
    QUADRATURE = "quadrature"


class VerificationSuite(Enum):
    """Groups of acceptance checks."""
    ALL = "all"
    ARITH = "arith"
    SPECFUN = "specfun"
    DISPERSION = "dispersion"
    HILL = "hill"
    ORACLE = "oracle"
