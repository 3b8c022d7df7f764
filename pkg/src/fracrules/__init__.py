"""Fractional Leibniz rules, Mittag-Leffler kernels and two-term fractional solvers."""

from fracrules.errors import (
    BoundaryLimitSingular,
    ConditionViolated,
    ContourFailure,
    DivergentParameters,
    FracRulesError,
    GridTooShort,
    InvalidExponent,
    InvalidKernel,
    NonConvergence,
    PoleHit,
    QuadratureBreakdown,
    SingularAtZero,
    UnsupportedForcing,
    ValidationError,
)
from fracrules.forcing import Forcing, parse_forcing
from fracrules.frac_operators import FracOrder, GridFunction, PowerMLKernel
from fracrules.special_functions import (
    BivariateMLParams,
    FoxWrightParams,
    MLParams,
    SeriesControl,
    bivariate_ml,
    fox_wright,
    ml2,
    ml3,
    recip_gamma,
)

__version__ = "0.1.0"

__all__ = [
    "BivariateMLParams",
    "BoundaryLimitSingular",
    "ConditionViolated",
    "ContourFailure",
    "DivergentParameters",
    "Forcing",
    "FoxWrightParams",
    "FracOrder",
    "FracRulesError",
    "GridFunction",
    "GridTooShort",
    "InvalidExponent",
    "InvalidKernel",
    "MLParams",
    "NonConvergence",
    "PoleHit",
    "PowerMLKernel",
    "QuadratureBreakdown",
    "SeriesControl",
    "SingularAtZero",
    "UnsupportedForcing",
    "ValidationError",
    "bivariate_ml",
    "fox_wright",
    "ml2",
    "ml3",
    "parse_forcing",
    "recip_gamma",
]
