"""Exception hierarchy shared by every fracrules module."""

from __future__ import annotations


class FracRulesError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(FracRulesError, ValueError):
    """A parameter record violates one of its invariants."""


class NonConvergence(FracRulesError, ArithmeticError):
    """A series or iteration did not meet its termination criterion."""


class DivergentParameters(ValidationError):
    """Fox-Wright parameters fail the series convergence condition."""


class SingularAtZero(FracRulesError, ArithmeticError):
    """A power-kernel value is requested at the origin where it blows up."""


class InvalidKernel(ValidationError):
    """A kernel does not satisfy the precondition of an analytic operator."""


class ConditionViolated(ValidationError):
    """The Caputo power-kernel condition gamma - 1 > floor(alpha) fails."""


class InvalidExponent(ValidationError):
    """A power-rule exponent is outside the admissible range."""


class GridTooShort(ValidationError):
    """A grid function has too few samples for the requested operator."""


class BoundaryLimitSingular(FracRulesError, ArithmeticError):
    """A boundary limit in a Leibniz rule diverges."""


class QuadratureBreakdown(FracRulesError, ArithmeticError):
    """Kernel evaluation failed while assembling quadrature weights."""


class PoleHit(FracRulesError, ArithmeticError):
    """A transfer function was evaluated too close to one of its poles."""


class ContourFailure(FracRulesError, ArithmeticError):
    """Two contour resolutions disagree beyond the accepted tolerance."""


class UnsupportedForcing(ValidationError):
    """A forcing description is not in the supported catalog."""
