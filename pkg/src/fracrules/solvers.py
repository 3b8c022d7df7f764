r"""Green's-function solvers for :math:`D^\alpha y - \mu D^\beta y - \lambda y = g`.

With zero initial data the solution is the convolution of ``g`` with the
Green kernel
:math:`G(\tau) = \tau^{\alpha-1}E_{\alpha,\alpha-\beta,\alpha}(\lambda\tau^\alpha, \mu\tau^{\alpha-\beta})`,
in both the Riemann-Liouville and the Caputo sense.  The classical oscillator
is the case :math:`\alpha = 2, \beta = 1`.
"""

from __future__ import annotations

import cmath
import enum
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from fracrules.errors import QuadratureBreakdown, ValidationError
from fracrules.forcing import Forcing
from fracrules.frac_operators import (
    BOUNDARY_LAYER,
    GRID_CONTROL,
    FracOrder,
    GridFunction,
    PowerMLKernel,
    caputo_derivative_numeric,
    convolution_exponents,
    kernel_convolution,
    nth_derivative,
    rl_derivative_numeric,
    rl_integral_numeric,
)
from fracrules.special_functions import (
    DEFAULT_CONTROL,
    BivariateMLParams,
    SeriesControl,
    bivariate_kernel_values,
)

__all__ = [
    "BagleyTorvikProblem",
    "Sense",
    "SolutionCertificate",
    "certify_solution",
    "classical_oscillator_reference",
    "green_kernel",
    "green_kernel_of",
    "solve_bagley_torvik",
    "solve_oscillator",
]

ForcingInput = Forcing | GridFunction | Callable[[np.ndarray], np.ndarray]


class Sense(enum.Enum):
    RIEMANN_LIOUVILLE = "rl"
    CAPUTO = "caputo"


@dataclass(frozen=True)
class BagleyTorvikProblem:
    r""":math:`D^\alpha y - \mu D^\beta y - \lambda y = g` on ``[0, T]`` with zero initial data.

    The signs follow the equation as written, so a damped oscillator
    :math:`y'' + c y' + k y = g` has ``mu = -c`` and ``lam = -k``.
    """

    alpha: float
    beta: float
    lam: float
    mu: float
    g: ForcingInput
    T: float
    N: int
    sense: Sense = Sense.CAPUTO

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "lam", "mu", "T"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not 1 < self.alpha <= 2:
            raise ValidationError(f"alpha must lie in (1, 2], got {self.alpha}")
        if not 0 < self.beta <= 1:
            raise ValidationError(f"beta must lie in (0, 1], got {self.beta}")
        if not self.T > 0:
            raise ValidationError(f"horizon T must be > 0, got {self.T}")
        if int(self.N) != self.N or self.N < 16:
            raise ValidationError(f"resolution N must be an integer >= 16, got {self.N}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "sense", Sense(self.sense))
        if isinstance(self.g, GridFunction):
            if len(self.g) != self.N + 1 or not math.isclose(self.g.h, self.h, rel_tol=1e-12):
                raise ValidationError("sampled forcing does not match the problem grid")
        elif not callable(self.g):
            raise ValidationError("forcing must be callable or a GridFunction")

    @property
    def h(self) -> float:
        return self.T / self.N

    @property
    def times(self) -> np.ndarray:
        return self.h * np.arange(self.N + 1)

    def g_grid(self) -> GridFunction:
        if isinstance(self.g, GridFunction):
            return self.g
        values = np.broadcast_to(np.asarray(self.g(self.times), dtype=float), self.times.shape)
        if not np.all(np.isfinite(values)):
            raise ValidationError("forcing is not finite on [0, T]")
        return GridFunction(0.0, self.h, values)


@dataclass(frozen=True)
class SolutionCertificate:
    """Residual of the equation after substituting a candidate solution."""

    y: GridFunction = field(repr=False)
    residual_max: float
    residual_rms: float
    ic_check: dict[str, float]
    t_min: float
    sense: Sense

    def to_dict(self) -> dict:
        return {
            "sense": self.sense.value,
            "t_min": self.t_min,
            "residual_max": self.residual_max,
            "residual_rms": self.residual_rms,
            "ic_check": dict(sorted(self.ic_check.items())),
            "n_nodes": len(self.y),
            "h": self.y.h,
        }


def green_kernel_of(alpha: float, beta: float, lam: float, mu: float) -> PowerMLKernel:
    """The Green kernel as a :class:`~fracrules.frac_operators.PowerMLKernel`."""
    return PowerMLKernel(1.0, alpha, alpha - beta, alpha, lam, mu)


def green_kernel(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    tau: float | np.ndarray,
    control: SeriesControl = DEFAULT_CONTROL,
) -> float | np.ndarray:
    r""":math:`\tau^{\alpha-1}E_{\alpha,\alpha-\beta,\alpha}(\lambda\tau^\alpha, \mu\tau^{\alpha-\beta})` for ``tau > 0``."""
    if not alpha > beta > 0:
        raise ValidationError(f"need alpha > beta > 0, got alpha={alpha}, beta={beta}")
    scalar = np.ndim(tau) == 0
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(tau <= 0) or not np.all(np.isfinite(tau)):
        raise ValidationError("tau must be finite and > 0")
    params = BivariateMLParams(alpha, alpha - beta, alpha)
    values = tau ** (alpha - 1) * bivariate_kernel_values(params, lam, mu, tau, control)
    return float(values[0]) if scalar else values


def solve_bagley_torvik(
    p: BagleyTorvikProblem, control: SeriesControl = GRID_CONTROL
) -> GridFunction:
    r"""Solution on the problem grid by product integration of ``G * g``.

    Both senses share the same formula and return identical arrays.
    """
    g = p.g_grid()
    try:
        return kernel_convolution(green_kernel_of(p.alpha, p.beta, p.lam, p.mu), g, control)
    except (FloatingPointError, OverflowError) as exc:
        raise QuadratureBreakdown(f"kernel evaluation failed on the grid: {exc}") from exc


def solve_oscillator(
    mu: float, lam: float, g: ForcingInput, T: float, N: int
) -> GridFunction:
    r""":math:`y'' - \mu y' - \lambda y = g`, ``y(0) = y'(0) = 0``, via the same convolution."""
    return solve_bagley_torvik(BagleyTorvikProblem(2.0, 1.0, lam, mu, g, T, N))


def classical_oscillator_reference(
    mu: float, lam: float, g: ForcingInput, T: float, N: int
) -> GridFunction:
    r"""Variation of parameters for :math:`y'' - \mu y' - \lambda y = g` with zero data.

    Uses the roots of :math:`r^2 - \mu r - \lambda` (distinct real, repeated
    or complex pair) and cumulative Simpson quadrature for the forcing
    integrals.
    """
    p = BagleyTorvikProblem(2.0, 1.0, lam, mu, g, T, N)
    t = p.times
    gv = np.asarray(p.g_grid().values)

    def cumulative(values: np.ndarray) -> np.ndarray:
        return integrate.cumulative_simpson(values, x=t, initial=0.0)

    disc = mu * mu + 4 * lam
    scale = max(1.0, abs(mu), abs(lam))
    if abs(disc) <= 1e-12 * scale * scale:
        r = mu / 2
        # impulse response t e^{rt}
        a = cumulative(np.exp(-r * t) * gv)
        b = cumulative(t * np.exp(-r * t) * gv)
        y = np.exp(r * t) * (t * a - b)
    elif disc > 0:
        sq = math.sqrt(disc)
        r1, r2 = (mu + sq) / 2, (mu - sq) / 2
        # impulse response (e^{r1 t} - e^{r2 t}) / (r1 - r2)
        y = (
            np.exp(r1 * t) * cumulative(np.exp(-r1 * t) * gv)
            - np.exp(r2 * t) * cumulative(np.exp(-r2 * t) * gv)
        ) / (r1 - r2)
    else:
        root = (mu + cmath.sqrt(disc)) / 2
        a, b = root.real, root.imag
        # impulse response e^{at} sin(bt) / b
        c = cumulative(np.exp(-a * t) * np.cos(b * t) * gv)
        s = cumulative(np.exp(-a * t) * np.sin(b * t) * gv)
        y = np.exp(a * t) * (np.sin(b * t) * c - np.cos(b * t) * s) / b
    return GridFunction(0.0, p.h, y)


def certify_solution(
    p: BagleyTorvikProblem, y: GridFunction, t_min: float | None = None
) -> SolutionCertificate:
    r"""Substitute ``y`` into the equation with the numerical operators of ``p.sense``.

    The residual :math:`D^\alpha y - \mu D^\beta y - \lambda y - g` is measured
    on nodes at or beyond ``t_min`` (default ``10 h``).  Initial conditions are
    reported as ``y(0)`` and ``y'(0)`` in the Caputo sense.  In the RL sense
    they are the values of :math:`I^{2-\alpha}y` and
    :math:`D^{\alpha-1}y = (I^{2-\alpha}y)'` at the first node after 0.
    """
    if len(y) != p.N + 1 or not math.isclose(y.h, p.h, rel_tol=1e-12):
        raise ValidationError("candidate solution is not on the problem grid")
    order_a, order_b = FracOrder(p.alpha), FracOrder(p.beta)
    if p.sense is Sense.CAPUTO:
        # a solution behaves like the convolution of g with the Green kernel near 0
        exps = convolution_exponents(green_kernel_of(p.alpha, p.beta, p.lam, p.mu), 3)
        da = caputo_derivative_numeric(y, order_a, exps).values
        db = caputo_derivative_numeric(y, order_b, exps).values
        ic = {
            "y(0)": float(abs(y.values[0])),
            "y'(0)": float(abs(nth_derivative(y.values, y.h, 1)[0])),
        }
    else:
        da = rl_derivative_numeric(y, order_a).values
        db = rl_derivative_numeric(y, order_b).values
        rho = 2 - p.alpha
        inner = rl_integral_numeric(y, rho).values if rho > 0 else np.asarray(y.values)
        ic = {
            "I^(2-alpha)y(h)": float(abs(inner[1])),
            "D^(alpha-1)y(h)": float(abs(nth_derivative(inner, y.h, 1)[1])),
        }
    residual = np.abs(da - p.mu * db - p.lam * y.values - p.g_grid().values)
    if t_min is None:
        t_min = BOUNDARY_LAYER * p.h
    mask = y.times >= t_min - 1e-12 * p.h
    r = residual[mask]
    return SolutionCertificate(
        y=y,
        residual_max=float(r.max()) if r.size else 0.0,
        residual_rms=float(np.sqrt(np.mean(r**2))) if r.size else 0.0,
        ic_check=ic,
        t_min=float(t_min),
        sense=p.sense,
    )
