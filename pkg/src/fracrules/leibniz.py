r"""Executable checks of the Leibniz integral rules for convolution integrals.

Every check works on :math:`F(t) = \int_0^t f(t-s)\,g(s)\,ds` with a closed-form
kernel ``f`` (:class:`~fracrules.frac_operators.PowerMLKernel`).  The left side
applies a numerical operator to the numerically convolved ``F``.  The right side
is assembled from boundary limits evaluated exactly on the kernel algebra plus
convolutions with analytically differentiated kernels.  A report compares the
two sides away from the initial point.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import numpy as np

from fracrules.errors import ConditionViolated, ValidationError
from fracrules.forcing import Forcing
from fracrules.frac_operators import (
    BOUNDARY_LAYER,
    FracOrder,
    GridFunction,
    Power,
    PowerMLKernel,
    Undefined,
    Zero,
    caputo_derivative_analytic,
    caputo_derivative_numeric,
    classical_derivative_analytic,
    convolution_exponents,
    kernel_convolution,
    kernel_limit_at_zero,
    nth_derivative,
    pascal_split,
    power_rule_caputo,
    rl_derivative_analytic,
    rl_derivative_numeric,
    rl_integral_analytic,
    rl_integral_numeric,
    split_until,
)
from fracrules.special_functions import recip_gamma

__all__ = [
    "ConvolutionProblem",
    "LeibnizReport",
    "caputo_leibniz_check",
    "caputo_rl_coincidence_check",
    "classical_leibniz_check",
    "pascal_split",
    "rl_caputo_relation_theorem_check",
    "rl_leibniz_check",
]

ForcingInput = Forcing | GridFunction | Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConvolutionProblem:
    """Kernel ``f``, forcing ``g`` and the grid ``t_i = i T / N`` on ``[0, T]``.

    ``g`` may be a :class:`~fracrules.forcing.Forcing` (exact derivatives), any
    vectorised callable (derivatives by finite differences) or a pre-sampled
    :class:`~fracrules.frac_operators.GridFunction` on the same grid.
    """

    f: PowerMLKernel
    g: ForcingInput
    T: float
    N: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValidationError(f"horizon T must be > 0, got {self.T}")
        if int(self.N) != self.N or self.N < 16:
            raise ValidationError(f"resolution N must be an integer >= 16, got {self.N}")
        if isinstance(self.g, GridFunction):
            if len(self.g) != self.N + 1 or not math.isclose(self.g.h, self.h, rel_tol=1e-12):
                raise ValidationError("sampled forcing does not match the problem grid")
            if self.g.t0 != 0:
                raise ValidationError("sampled forcing must start at t = 0")
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

    def g_derivative(self, k: int) -> np.ndarray:
        """Samples of the ``k``-th derivative of ``g`` on the grid."""
        if isinstance(self.g, Forcing):
            return np.asarray(self.g.derivative(k)(self.times), dtype=float)
        return nth_derivative(self.g_grid().values, self.h, k)


@dataclass(frozen=True)
class LeibnizReport:
    """Both sides of one rule on the problem grid, with residual norms."""

    check: str
    t0: float
    h: float
    lhs: np.ndarray = field(repr=False)
    rhs: np.ndarray = field(repr=False)
    boundary_terms: dict[int, float]
    max_residual: float
    rms_residual: float
    t_min: float
    diagnostics: dict[str, float] = field(default_factory=dict)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.lhs.size)

    def to_dict(self, include_samples: bool = False) -> dict:
        out = {
            "check": self.check,
            "t0": self.t0,
            "h": self.h,
            "n_nodes": int(self.lhs.size),
            "t_min": self.t_min,
            "boundary_terms": {str(k): v for k, v in sorted(self.boundary_terms.items())},
            "max_residual": self.max_residual,
            "rms_residual": self.rms_residual,
            "diagnostics": dict(sorted(self.diagnostics.items())),
        }
        if include_samples:
            out["t"] = self.times.tolist()
            out["lhs"] = self.lhs.tolist()
            out["rhs"] = self.rhs.tolist()
        return out


def _interior(p: ConvolutionProblem, t_min: float | None) -> tuple[np.ndarray, float]:
    if t_min is None:
        t_min = BOUNDARY_LAYER * p.h
    return p.times >= t_min - 1e-12 * p.h, float(t_min)


def _report(
    check: str,
    p: ConvolutionProblem,
    lhs: np.ndarray,
    rhs: np.ndarray,
    boundary: dict[int, float],
    t_min: float | None,
    diagnostics: dict[str, float] | None = None,
) -> LeibnizReport:
    mask, t_min = _interior(p, t_min)
    residual = np.abs(lhs - rhs)[mask]
    return LeibnizReport(
        check=check,
        t0=0.0,
        h=p.h,
        lhs=np.asarray(lhs, dtype=float),
        rhs=np.asarray(rhs, dtype=float),
        boundary_terms=boundary,
        max_residual=float(residual.max()) if residual.size else 0.0,
        rms_residual=float(np.sqrt(np.mean(residual**2))) if residual.size else 0.0,
        t_min=t_min,
        diagnostics=diagnostics or {},
    )


def _rl_shift(k: PowerMLKernel, nu: float) -> PowerMLKernel:
    """RL derivative of order ``nu`` for ``nu > 0``, RL integral of order ``-nu`` otherwise."""
    if nu > 0:
        return rl_derivative_analytic(k, FracOrder(nu))
    if nu < 0:
        return rl_integral_analytic(k, -nu)
    return k


def _classical_bracket(
    k: PowerMLKernel, n: int, p: ConvolutionProblem
) -> tuple[np.ndarray, dict[int, float]]:
    r""":math:`\sum_{l=1}^n \lim_{\tau\to0^+}\partial^{n-l}f(\tau)\,g^{(l-1)}(t)`."""
    total = np.zeros(p.N + 1)
    limits = {}
    for l in range(1, n + 1):
        limits[l] = kernel_limit_at_zero(classical_derivative_analytic(k, n - l))
        if limits[l] != 0:
            total += limits[l] * p.g_derivative(l - 1)
    return total, limits


def classical_leibniz_check(
    n: int, p: ConvolutionProblem, t_min: float | None = None
) -> LeibnizReport:
    r"""``n``-th derivative of the convolution against boundary terms plus
    :math:`\int_0^t \partial^n f(t-s)\,g(s)\,ds`."""
    if n < 1:
        raise ValidationError(f"derivative order must be >= 1, got {n}")
    g = p.g_grid()
    conv = kernel_convolution(p.f, g)
    lhs = nth_derivative(conv.values, p.h, n)
    bracket, limits = _classical_bracket(p.f, n, p)
    rhs = bracket + kernel_convolution(classical_derivative_analytic(p.f, n), g).values
    return _report("classical-leibniz", p, lhs, rhs, limits, t_min)


def rl_leibniz_check(
    order: FracOrder, p: ConvolutionProblem, t_min: float | None = None
) -> LeibnizReport:
    r"""RL derivative of the convolution against
    :math:`\sum_l \lim D^{\alpha-l}f\cdot g^{(l-1)}(t) + \int_0^t D^\alpha f(t-s)\,g(s)\,ds`."""
    g = p.g_grid()
    conv = kernel_convolution(p.f, g)
    lhs = rl_derivative_numeric(conv, order).values
    rhs = kernel_convolution(rl_derivative_analytic(p.f, order), g).values.copy()
    limits = {}
    for l in range(1, order.n + 1):
        limits[l] = kernel_limit_at_zero(_rl_shift(p.f, order.alpha - l))
        if limits[l] != 0:
            rhs += limits[l] * p.g_derivative(l - 1)
    return _report("rl-leibniz", p, lhs, rhs, limits, t_min)


def caputo_leibniz_check(
    order: FracOrder, p: ConvolutionProblem, t_min: float | None = None
) -> LeibnizReport:
    r"""Caputo derivative of the convolution against
    :math:`I^{n-\alpha}\{\sum_l \lim\partial^{n-l}f\cdot g^{(l-1)}\} + \int_0^t {}^C\!D^\alpha f(t-s)\,g(s)\,ds`.

    The kernel is Pascal-split until every non-pure piece satisfies
    ``gamma - 1 > floor(alpha)``.  A remaining pure power
    :math:`\tau^{\gamma-1}/\Gamma(\gamma)` goes through the power rule.  If the
    rule leaves it undefined but :math:`\gamma \ge \alpha`, it contributes
    :math:`I^{\gamma-\alpha}g`, because the Caputo derivative is a left
    inverse of :math:`I^\alpha` on continuous functions.
    """
    if order.n < 2:
        raise ValidationError(f"Caputo rule check needs n >= 2, got alpha={order.alpha}")
    n = order.n
    floor_alpha = math.floor(order.alpha)
    g = p.g_grid()

    def admissible(k: PowerMLKernel) -> bool:
        return round(k.gamma - 1, 12) > floor_alpha

    bracket = np.zeros(p.N + 1)
    rhs = np.zeros(p.N + 1)
    limits = {l: 0.0 for l in range(1, n + 1)}
    kernels: list[PowerMLKernel] = []
    for piece in split_until(p.f, admissible):
        if admissible(piece):
            kernels.append(caputo_derivative_analytic(piece, order))
        else:
            rule = power_rule_caputo(piece.gamma - 1, order.alpha)
            if isinstance(rule, Undefined):
                if piece.gamma < order.alpha:
                    raise ConditionViolated(
                        f"kernel piece with gamma={piece.gamma} has no Caputo derivative "
                        f"of order {order.alpha}"
                    )
                rho = piece.gamma - order.alpha
                shifted = rl_integral_numeric(g, rho).values if rho > 0 else g.values
                rhs += piece.coef * shifted
                continue
            if isinstance(rule, Power):
                kernels.append(replace(piece, gamma=piece.gamma - order.alpha))
            else:
                assert isinstance(rule, Zero)
        piece_bracket, piece_limits = _classical_bracket(piece, n, p)
        bracket += piece_bracket
        for l, value in piece_limits.items():
            limits[l] += value
    for k in kernels:
        rhs += kernel_convolution(k, g).values
    rho = n - order.alpha
    rhs += rl_integral_numeric(g.with_values(bracket), rho).values if rho > 0 else bracket
    conv = kernel_convolution(p.f, g)
    lhs = caputo_derivative_numeric(conv, order, convolution_exponents(p.f, n + 1)).values
    return _report("caputo-leibniz", p, lhs, rhs, limits, t_min)


def caputo_rl_coincidence_check(
    order: FracOrder, p: ConvolutionProblem, t_min: float | None = None
) -> LeibnizReport:
    r"""For :math:`0 < \alpha \le 1`: Caputo derivative of the convolution against
    :math:`\lim I^{1-\alpha}f\cdot g(t) + \int_0^t D^\alpha f(t-s)\,g(s)\,ds`.

    ``diagnostics["caputo_minus_rl"]`` is the largest gap between the numerical
    Caputo and RL derivatives of the convolution on the interior nodes.
    """
    if not order.alpha <= 1:
        raise ValidationError(f"coincidence check needs alpha <= 1, got {order.alpha}")
    g = p.g_grid()
    conv = kernel_convolution(p.f, g)
    lhs = caputo_derivative_numeric(conv, order, convolution_exponents(p.f, 2)).values
    rl_lhs = rl_derivative_numeric(conv, order).values
    limit = kernel_limit_at_zero(_rl_shift(p.f, order.alpha - 1))
    rhs = kernel_convolution(rl_derivative_analytic(p.f, order), g).values.copy()
    if limit != 0:
        rhs += limit * p.g_derivative(0)
    mask, _ = _interior(p, t_min)
    gap = float(np.max(np.abs(lhs - rl_lhs)[mask])) if mask.any() else 0.0
    return _report(
        "coincidence", p, lhs, rhs, {1: limit}, t_min, {"caputo_minus_rl": gap}
    )


def rl_caputo_relation_theorem_check(
    order: FracOrder, p: ConvolutionProblem, t_min: float | None = None
) -> LeibnizReport:
    r"""RL minus Caputo derivative of the convolution against the initial-value terms.

    The correction is
    :math:`\sum_{i=1}^{n-1}\sum_{l=1}^{i}\lim\partial^{i-l}f\cdot g^{(l-1)}(0)\,
    t^{i-\alpha}/\Gamma(i-\alpha+1)`.  Each inner sum equals :math:`F^{(i)}(0)`
    by the classical rule, so only exact boundary limits enter.
    """
    if order.n < 2:
        raise ValidationError(f"relation check needs n >= 2, got alpha={order.alpha}")
    g = p.g_grid()
    conv = kernel_convolution(p.f, g)
    caputo = caputo_derivative_numeric(conv, order, convolution_exponents(p.f, order.n + 1))
    lhs = rl_derivative_numeric(conv, order).values - caputo.values
    t = p.times
    rhs = np.zeros(p.N + 1)
    initial = {}
    for i in range(1, order.n):
        value = 0.0
        for l in range(1, i + 1):
            limit = kernel_limit_at_zero(classical_derivative_analytic(p.f, i - l))
            if limit != 0:
                value += limit * float(p.g_derivative(l - 1)[0])
        initial[i] = value
        coef = value * recip_gamma(i - order.alpha + 1)
        if coef != 0:
            rhs[1:] += coef * t[1:] ** (i - order.alpha)
    return _report("relation", p, lhs, rhs, initial, t_min)
