r"""Riemann-Liouville and Caputo operators.

Two families live here:

* exact maps on :class:`PowerMLKernel`, the closed-form kernels
  :math:`c\,\tau^{\gamma-1}E_{\alpha,\beta,\gamma}(\lambda\tau^\alpha, \mu\tau^\beta)`;
  every operator only shifts :math:`\gamma`;
* numerical operators on uniformly sampled :class:`GridFunction` values, built
  on a product-trapezoid rule that integrates the weakly singular kernel
  exactly against a piecewise-linear integrand.

Numerical results carry no accuracy claim within ten steps of the initial
point, where the weak singularity dominates.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

import numpy as np

from fracrules.errors import (
    BoundaryLimitSingular,
    ConditionViolated,
    GridTooShort,
    InvalidExponent,
    InvalidKernel,
    ValidationError,
)
from fracrules.special_functions import (
    BivariateMLParams,
    SeriesControl,
    bivariate_kernel_values,
    recip_gamma,
)

__all__ = [
    "GRID_CONTROL",
    "FracOrder",
    "GridFunction",
    "Power",
    "PowerMLKernel",
    "Undefined",
    "Zero",
    "caputo_derivative_analytic",
    "caputo_derivative_numeric",
    "classical_derivative_analytic",
    "convolution_exponents",
    "integrable_pieces",
    "kernel_convolution",
    "kernel_limit_at_zero",
    "nth_derivative",
    "pascal_split",
    "power_rule_caputo",
    "power_rule_rl",
    "rl_caputo_relation_check",
    "rl_derivative_analytic",
    "rl_derivative_numeric",
    "rl_integral_analytic",
    "rl_integral_numeric",
    "split_until",
]

# Kernel samples feed O(h^2) quadratures, so double-precision series are
# accepted up to a much larger cancellation ratio than for point values.
GRID_CONTROL = SeriesControl(cancellation_limit=1e12, float_error_target=1e-4)

# gamma values closer than this to an integer are treated as that integer
_SNAP = 1e-12
# number of grid steps next to t0 excluded from accuracy statements
BOUNDARY_LAYER = 10


def _snap(x: float) -> float:
    r = round(x)
    return float(r) if abs(x - r) < _SNAP else x


# -- domain types -----------------------------------------------------------


@dataclass(frozen=True)
class FracOrder:
    """Fractional order ``alpha`` with ``n - 1 < alpha <= n`` and ``n >= 1``."""

    alpha: float

    def __post_init__(self) -> None:
        alpha = float(self.alpha)
        if not (math.isfinite(alpha) and alpha > 0):
            raise ValidationError(f"order alpha must be finite and > 0, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    @property
    def n(self) -> int:
        return max(1, math.ceil(self.alpha))

    @property
    def is_integer(self) -> bool:
        return self.alpha == self.n


@dataclass(frozen=True)
class PowerMLKernel:
    r"""Closed-form kernel
    :math:`f(\tau) = c\,\tau^{\gamma-1}E_{\alpha,\beta,\gamma}(\lambda\tau^\alpha, \mu\tau^\beta)`.

    The pure power :math:`c\,\tau^{\gamma-1}/\Gamma(\gamma)` is the case
    ``lam == mu == 0``.
    """

    coef: float
    alpha: float
    beta: float
    gamma: float
    lam: float = 0.0
    mu: float = 0.0

    def __post_init__(self) -> None:
        for name in ("coef", "alpha", "beta", "gamma", "lam", "mu"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"kernel field {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if not (self.alpha > 0 and self.beta > 0):
            raise ValidationError(
                f"kernel alpha and beta must be > 0, got {self.alpha}, {self.beta}"
            )

    @classmethod
    def power(cls, gamma: float, coef: float = 1.0) -> PowerMLKernel:
        r""":math:`c\,\tau^{\gamma-1}/\Gamma(\gamma)`."""
        return cls(coef, 1.0, 1.0, gamma)

    @property
    def is_pure_power(self) -> bool:
        return self.lam == 0 and self.mu == 0

    @property
    def params(self) -> BivariateMLParams:
        return BivariateMLParams(self.alpha, self.beta, self.gamma)

    def series_factor(
        self, tau: np.ndarray, control: SeriesControl = GRID_CONTROL
    ) -> np.ndarray:
        r""":math:`E_{\alpha,\beta,\gamma}(\lambda\tau^\alpha, \mu\tau^\beta)` without power or coefficient."""
        tau = np.asarray(tau, dtype=float)
        if self.is_pure_power:
            return np.full(tau.shape, recip_gamma(self.gamma))
        return bivariate_kernel_values(self.params, self.lam, self.mu, tau, control)

    def __call__(self, tau: np.ndarray, control: SeriesControl = GRID_CONTROL) -> np.ndarray:
        """Kernel values at ``tau > 0``."""
        tau = np.asarray(tau, dtype=float)
        if np.any(tau <= 0):
            raise ValidationError("kernel values are only defined for tau > 0")
        if self.coef == 0:
            return np.zeros(tau.shape)
        return self.coef * tau ** (self.gamma - 1) * self.series_factor(tau, control)


@dataclass(frozen=True)
class GridFunction:
    """Real samples on the uniform grid ``t0 + i*h``."""

    t0: float
    h: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 2:
            raise ValidationError("a grid function needs a 1-D array of at least 2 samples")
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValidationError(f"grid step h must be > 0, got {self.h}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "h", float(self.h))

    @classmethod
    def sample(
        cls, func: Callable[[np.ndarray], np.ndarray], t0: float, T: float, N: int
    ) -> GridFunction:
        """Sample ``func`` at ``N + 1`` nodes spanning ``[t0, t0 + T]``."""
        if N < 1 or not T > 0:
            raise ValidationError(f"need T > 0 and N >= 1, got T={T}, N={N}")
        h = T / N
        t = t0 + h * np.arange(N + 1)
        return cls(t0, h, np.broadcast_to(np.asarray(func(t), dtype=float), t.shape))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.h * np.arange(self.values.size)

    def __len__(self) -> int:
        return int(self.values.size)

    def with_values(self, values: np.ndarray) -> GridFunction:
        return GridFunction(self.t0, self.h, values)

    def interior(self, t_min: float | None = None) -> np.ndarray:
        """Mask of nodes at or beyond ``t_min`` (default ``t0 + 10 h``)."""
        if t_min is None:
            t_min = self.t0 + BOUNDARY_LAYER * self.h
        return self.times >= t_min - 1e-12 * self.h


# -- power rules --------------------------------------------------------------


@dataclass(frozen=True)
class Power:
    r"""The monomial ``coefficient * t**exponent``."""

    coefficient: float
    exponent: float


@dataclass(frozen=True)
class Zero:
    """The operator annihilates the input."""


@dataclass(frozen=True)
class Undefined:
    """The operator is not defined for the input."""


PowerRuleResult = Power | Zero | Undefined


def power_rule_rl(eta: float, nu: float) -> Power:
    r"""RL derivative of order ``nu`` of :math:`t^\eta/\Gamma(\eta+1)`:
    :math:`t^{\eta-\nu}/\Gamma(\eta-\nu+1)`, valid for :math:`\eta > -1`.

    A negative ``nu`` gives the RL integral of order ``-nu``.
    """
    if not eta > -1:
        raise InvalidExponent(f"power rule needs eta > -1, got {eta}")
    exponent = _snap(eta - nu)
    return Power(recip_gamma(exponent + 1), exponent)


def power_rule_caputo(eta: float, nu: float) -> PowerRuleResult:
    r"""Caputo derivative of order ``nu`` of :math:`t^\eta/\Gamma(\eta+1)`.

    With :math:`m = \lceil\nu\rceil - 1` (equal to :math:`\lfloor\nu\rfloor`
    for non-integer orders) the result is a power for :math:`\eta > m`, zero
    for :math:`\eta \in \{0, \dots, m\}` and undefined otherwise.
    """
    if not nu > 0:
        raise ValidationError(f"Caputo order must be > 0, got {nu}")
    m = math.ceil(nu) - 1
    eta_s = _snap(eta)
    if eta_s > m:
        exponent = _snap(eta - nu)
        return Power(recip_gamma(exponent + 1), exponent)
    if eta_s == round(eta_s) and 0 <= eta_s <= m:
        return Zero()
    return Undefined()


# -- analytic kernel algebra ------------------------------------------------------


def rl_integral_analytic(k: PowerMLKernel, rho: float) -> PowerMLKernel:
    """RL integral of order ``rho``: ``gamma -> gamma + rho``."""
    if not rho > 0:
        raise ValidationError(f"integral order must be > 0, got {rho}")
    return replace(k, gamma=_snap(k.gamma + rho))


def rl_derivative_analytic(k: PowerMLKernel, order: FracOrder) -> PowerMLKernel:
    """RL derivative: ``gamma -> gamma - alpha``; needs ``gamma > 0``."""
    if not k.gamma > 0:
        raise InvalidKernel(f"RL derivative of a kernel needs gamma > 0, got {k.gamma}")
    return replace(k, gamma=_snap(k.gamma - order.alpha))


def caputo_derivative_analytic(k: PowerMLKernel, order: FracOrder) -> PowerMLKernel:
    """Caputo derivative: ``gamma -> gamma - alpha``; needs ``gamma - 1 > floor(alpha)``."""
    if not _snap(k.gamma - 1) > math.floor(order.alpha):
        raise ConditionViolated(
            f"Caputo derivative of a kernel needs gamma - 1 > floor(alpha); "
            f"got gamma={k.gamma}, alpha={order.alpha}"
        )
    return replace(k, gamma=_snap(k.gamma - order.alpha))


def classical_derivative_analytic(k: PowerMLKernel, m: int) -> PowerMLKernel:
    """Ordinary ``m``-th derivative for ``tau > 0``: ``gamma -> gamma - m``."""
    if m < 0:
        raise ValidationError(f"derivative order must be >= 0, got {m}")
    return replace(k, gamma=_snap(k.gamma - m))


def pascal_split(k: PowerMLKernel) -> list[PowerMLKernel]:
    r"""Rewrite a kernel as pure power plus two shifted kernels.

    .. math::

        \tau^{\gamma-1}E_{\alpha,\beta,\gamma}
            = \frac{\tau^{\gamma-1}}{\Gamma(\gamma)}
            + \lambda\,\tau^{\gamma+\alpha-1}E_{\alpha,\beta,\gamma+\alpha}
            + \mu\,\tau^{\gamma+\beta-1}E_{\alpha,\beta,\gamma+\beta}

    Pieces with a vanishing coefficient (including a pure power at a pole of
    :math:`\Gamma`) are dropped.
    """
    if k.is_pure_power:
        return [k] if k.coef != 0 and recip_gamma(k.gamma) != 0 else []
    pieces = []
    if recip_gamma(k.gamma) != 0:
        pieces.append(PowerMLKernel(k.coef, k.alpha, k.beta, k.gamma))
    if k.lam != 0:
        pieces.append(replace(k, coef=k.coef * k.lam, gamma=_snap(k.gamma + k.alpha)))
    if k.mu != 0:
        pieces.append(replace(k, coef=k.coef * k.mu, gamma=_snap(k.gamma + k.beta)))
    return [p for p in pieces if p.coef != 0]


def split_until(
    k: PowerMLKernel, accept: Callable[[PowerMLKernel], bool], max_depth: int = 64
) -> list[PowerMLKernel]:
    """Pascal-split recursively until every non-pure piece satisfies ``accept``.

    Pure powers are returned as they are, whether or not they satisfy ``accept``.
    """
    out: list[PowerMLKernel] = []
    stack = [(k, 0)]
    while stack:
        piece, depth = stack.pop()
        if piece.coef == 0:
            continue
        if accept(piece) or piece.is_pure_power:
            out.append(piece)
            continue
        if depth >= max_depth:
            raise ConditionViolated("Pascal splitting did not reach an admissible kernel")
        stack.extend((p, depth + 1) for p in reversed(pascal_split(piece)))
    return out


def _smooth_enough(k: PowerMLKernel) -> bool:
    # the series factor is 1/Gamma(gamma) + O(tau^e); linearising it on a panel
    # costs O(h^(gamma + e)), so split until that is at least second order
    steps = [x for x, c in ((k.alpha, k.lam), (k.beta, k.mu)) if c != 0]
    return k.gamma > 0 and (not steps or k.gamma + min(steps) >= 2)


def integrable_pieces(k: PowerMLKernel, smooth: bool = False) -> list[PowerMLKernel]:
    """Split a kernel into pieces with ``gamma > 0`` (locally integrable at 0).

    With ``smooth=True`` non-pure pieces are split further until their series
    factor is smooth enough for second-order product integration.
    """
    pieces = split_until(k, _smooth_enough if smooth else (lambda p: p.gamma > 0))
    for p in pieces:
        if p.gamma <= 0 and recip_gamma(p.gamma) != 0:
            raise InvalidKernel(
                f"kernel term tau^{p.gamma - 1:g} is not integrable at the origin"
            )
    return [p for p in pieces if p.gamma > 0]


def kernel_limit_at_zero(k: PowerMLKernel) -> float:
    r"""Exact value of :math:`\lim_{\tau\to0^+} f(\tau)`.

    Only the finitely many series terms with non-positive power exponent can
    contribute.  A negative exponent with a non-zero coefficient makes the
    limit diverge, and :class:`~fracrules.errors.BoundaryLimitSingular` is raised.
    """
    if k.coef == 0:
        return 0.0
    limit = 0.0
    max_l = 0 if k.lam == 0 else int(max(0.0, (1 - k.gamma) / k.alpha)) + 1
    max_k = 0 if k.mu == 0 else int(max(0.0, (1 - k.gamma) / k.beta)) + 1
    for l in range(max_l + 1):
        for j in range(max_k + 1):
            exponent = _snap(k.gamma - 1 + l * k.alpha + j * k.beta)
            if exponent > 0:
                continue
            weight = (
                k.coef
                * math.comb(l + j, j)
                * (k.lam**l if l else 1.0)
                * (k.mu**j if j else 1.0)
                * recip_gamma(exponent + 1)
            )
            if weight == 0:
                continue
            if exponent < 0:
                raise BoundaryLimitSingular(
                    f"kernel behaves like tau^{exponent:g} at the origin"
                )
            limit += weight
    return limit


# -- product-trapezoid weights --------------------------------------------------


_SERIES_FROM = 16
_SERIES_TERMS = 14


def _binomials(p: float, count: int) -> list[float]:
    """Generalised binomial coefficients C(p, k) for k = 0..count-1."""
    out = [1.0]
    for k in range(1, count):
        out.append(out[-1] * (p - k + 1) / k)
    return out


def _second_difference_powers(p: float, m: np.ndarray) -> np.ndarray:
    """(m+1)^p - 2 m^p + (m-1)^p for m >= 1, without cancellation for large m."""
    m = m.astype(float)
    out = np.empty_like(m)
    small = m < _SERIES_FROM
    ms = m[small]
    out[small] = (ms + 1) ** p - 2 * ms**p + (ms - 1) ** p
    ml = m[~small]
    if ml.size:
        binom = _binomials(p, 2 * _SERIES_TERMS + 1)
        acc = np.zeros_like(ml)
        for k in range(_SERIES_TERMS, 0, -1):
            acc += 2 * binom[2 * k] * ml ** (p - 2 * k)
        out[~small] = acc
    return out


def _start_weights(p: float, n: np.ndarray) -> np.ndarray:
    """(n-1)^p - (n-p) n^(p-1) for n >= 1, without cancellation for large n."""
    n = n.astype(float)
    out = np.empty_like(n)
    small = n < _SERIES_FROM
    ns = n[small]
    out[small] = (ns - 1) ** p - (ns - p) * ns ** (p - 1)
    nl = n[~small]
    if nl.size:
        binom = _binomials(p, 2 * _SERIES_TERMS + 2)
        acc = np.zeros_like(nl)
        for k in range(2 * _SERIES_TERMS + 1, 1, -1):
            acc += binom[k] * (-1) ** k * nl ** (p - k)
        out[~small] = acc
    return out


@lru_cache(maxsize=64)
def _trapezoid_weights(rho: float, size: int) -> tuple[np.ndarray, np.ndarray]:
    r"""Weights of :math:`\int_0^{t_n}(t_n-s)^{\rho-1}f(s)\,ds` for piecewise-linear f.

    In units of :math:`h^\rho/(\rho(\rho+1))` the integral equals
    ``sum_{j>=1} lag[n-j] f_j + start[n] f_0``.
    """
    p = rho + 1
    lag = np.empty(size)
    lag[0] = 1.0
    if size > 1:
        lag[1:] = _second_difference_powers(p, np.arange(1, size))
    start = np.zeros(size)
    if size > 1:
        start[1:] = _start_weights(p, np.arange(1, size))
    lag.setflags(write=False)
    start.setflags(write=False)
    return lag, start


def _weighted_convolution(
    rho: float, kernel_samples: np.ndarray, f: np.ndarray
) -> np.ndarray:
    r""":math:`\int_0^{t_n}\tau^{\rho-1}K(\tau)f(t_n-\tau)\,d\tau` with K f linearised per panel.

    ``kernel_samples[m]`` is :math:`K(m h)`; the result is in units of
    :math:`h^\rho/(\rho(\rho+1))`.
    """
    size = f.size
    lag, start = _trapezoid_weights(float(rho), size)
    weighted = lag * kernel_samples[:size]
    full = np.convolve(weighted, f)[:size]
    corrected = full + (start * kernel_samples[:size] - weighted) * f[0]
    corrected[0] = 0.0
    return corrected


# -- numeric operators ------------------------------------------------------------


def rl_integral_numeric(f: GridFunction, rho: float) -> GridFunction:
    r"""RL integral :math:`I^\rho f` at every node by product trapezoid.

    Exact for piecewise-linear data, :math:`O(h^2)` for smooth data; the value
    at ``t0`` is zero.
    """
    if not rho > 0:
        raise ValidationError(f"integral order must be > 0, got {rho}")
    scale = f.h**rho * recip_gamma(rho + 2)
    ones = np.ones(len(f))
    values = scale * _weighted_convolution(rho, ones, np.asarray(f.values))
    return f.with_values(values)


@lru_cache(maxsize=256)
def _difference_weights(n: int, offsets: tuple[int, ...]) -> tuple[float, ...]:
    r"""Weights ``c`` with ``f^{(n)}(0) ~ sum_j c_j Delta^n f(a_j) / h^n``.

    ``offsets`` are the start indices ``a_j`` of the n-th differences relative
    to the target node.  The combination is exact for polynomials of degree
    below ``n + len(offsets)``.
    """
    size = len(offsets)

    def moment(q: int, a: int) -> Fraction:
        # Delta^n x^(n+q) at a, scaled so that it reproduces the q-th moment
        total = sum(
            (-1) ** (n - r) * math.comb(n, r) * Fraction(a + r) ** (n + q) for r in range(n + 1)
        )
        return total * Fraction(math.factorial(q), math.factorial(n + q))

    matrix = [[moment(q, a) for a in offsets] for q in range(size)]
    rhs = [Fraction(1 if q == 0 else 0) for q in range(size)]
    return tuple(float(x) for x in _solve_exact(matrix, rhs))


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    size = len(rhs)
    a = [row[:] + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(size):
            if r != col and a[r][col] != 0:
                factor = a[r][col] / a[col][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][size] / a[i][i] for i in range(size)]


_STENCIL = 4


def nth_derivative(values: np.ndarray, h: float, n: int) -> np.ndarray:
    """``n``-th derivative at every node from finite differences.

    Each estimate combines up to four ``n``-th differences: a centred
    combination in the interior, one-sided windows at both ends.  Because only
    differences enter, polynomials of degree below ``n`` give exactly zero.
    """
    values = np.asarray(values, dtype=float)
    if n == 0:
        return values.copy()
    if values.size < n + 1:
        raise GridTooShort(f"need at least {n + 1} samples for an order-{n} difference")
    diffs = np.diff(values, n)
    count = diffs.size
    width = min(_STENCIL, count)
    out = np.empty(values.size)
    scale = h**-n
    # centred window: differences starting near i - n/2
    for i in range(values.size):
        first = int(math.floor(i - n / 2 - (width - 1) / 2 + 0.5))
        first = min(max(first, 0), count - width)
        offsets = tuple(range(first - i, first - i + width))
        weights = _difference_weights(n, offsets)
        out[i] = scale * float(np.dot(weights, diffs[first : first + width]))
    return out


def _check_samples(f: GridFunction, order: FracOrder) -> None:
    if len(f) < order.n + 2:
        raise GridTooShort(
            f"order {order.alpha} needs at least {order.n + 2} samples, got {len(f)}"
        )


def rl_derivative_numeric(f: GridFunction, order: FracOrder) -> GridFunction:
    r"""RL derivative :math:`D^n I^{n-\alpha} f`: integrate first, then differentiate."""
    _check_samples(f, order)
    rho = order.n - order.alpha
    inner = rl_integral_numeric(f, rho).values if rho > 0 else f.values
    return f.with_values(nth_derivative(inner, f.h, order.n))


def _caputo_plain(f: GridFunction, order: FracOrder) -> np.ndarray:
    derivative = f.with_values(nth_derivative(f.values, f.h, order.n))
    rho = order.n - order.alpha
    return rl_integral_numeric(derivative, rho).values if rho > 0 else derivative.values


def caputo_derivative_numeric(
    f: GridFunction, order: FracOrder, singular_exponents: Sequence[float] = ()
) -> GridFunction:
    r"""Caputo derivative :math:`I^{n-\alpha} D^n f`: differentiate first, then integrate.

    Finite differences cannot resolve a component :math:`(t-t_0)^\sigma` with
    non-integer :math:`\sigma < n` near ``t0``.  The resulting error in the
    integrated mass does not decay away from ``t0``.  When such exponents are
    known they can be passed as ``singular_exponents``.  Starting weights on
    the first samples then make the scheme exact for those powers while it
    stays exact for polynomials of degree up to ``n + 1``.
    """
    _check_samples(f, order)
    plain = _caputo_plain(f, order)
    sigmas = sorted({round(_snap(float(s)), 10) for s in singular_exponents})
    sigmas = [s for s in sigmas if 0 < s < order.n + 1 and s != round(s)]
    if not sigmas:
        return f.with_values(plain)
    # the plain scheme is exact up to degree n + 1; keep the correction blind to those
    basis = list(range(order.n + 2)) + sigmas
    size = len(basis)
    if len(f) < size + order.n + 2:
        raise GridTooShort(f"starting weights need at least {size + order.n + 2} samples")
    tau = f.times - f.t0
    # defect of the plain scheme on each basis function, in units of h^sigma
    defects = np.zeros((size, len(f)))
    for q, sigma in enumerate(sigmas, start=order.n + 2):
        power = f.with_values(tau**sigma)
        exact = np.zeros(len(f))
        exact[1:] = math.gamma(sigma + 1) * recip_gamma(sigma - order.alpha + 1) * tau[1:] ** (
            sigma - order.alpha
        )
        defects[q] = (exact - _caputo_plain(power, order)) / f.h**sigma
    nodes = np.arange(size, dtype=float)
    with np.errstate(divide="ignore"):
        matrix = np.array([nodes**b if b else np.ones(size) for b in basis])
    weights = np.linalg.solve(matrix, defects)
    values = plain + weights.T @ np.asarray(f.values[:size])
    values[0] = plain[0]
    return f.with_values(values)


def initial_derivatives(f: GridFunction, count: int) -> list[float]:
    """One-sided estimates of ``f^(k)(t0)`` for ``k < count``."""
    return [float(nth_derivative(f.values, f.h, k)[0]) for k in range(count)]


def rl_caputo_correction(f: GridFunction, order: FracOrder) -> np.ndarray:
    r""":math:`\sum_{k<n} (t-t_0)^{k-\alpha} f^{(k)}(t_0)/\Gamma(k-\alpha+1)` at every node but ``t0``."""
    tau = f.times - f.t0
    out = np.zeros(len(f))
    with np.errstate(divide="ignore"):
        for k, dk in enumerate(initial_derivatives(f, order.n)):
            coef = dk * recip_gamma(k - order.alpha + 1)
            if coef != 0:
                out[1:] += coef * tau[1:] ** (k - order.alpha)
    out[0] = np.nan
    return out


def rl_caputo_relation_check(
    f: GridFunction, order: FracOrder, t_min: float | None = None
) -> float:
    """Largest violation of RL = Caputo + initial-value terms on nodes beyond ``t_min``.

    ``t_min`` defaults to ``t0 + 10 h``.
    """
    rl = rl_derivative_numeric(f, order).values
    caputo = caputo_derivative_numeric(f, order).values
    residual = np.abs(rl - caputo - rl_caputo_correction(f, order))
    mask = f.interior(t_min)
    mask[0] = False
    return float(np.max(residual[mask])) if mask.any() else 0.0


def convolution_exponents(k: PowerMLKernel, below: float) -> list[float]:
    r"""Powers :math:`t^\sigma`, :math:`\sigma < ` ``below``, in the expansion of
    :math:`\int_0^t f(t-s)\,g(s)\,ds` for a smooth ``g``."""
    out = set()
    max_l = 0 if k.lam == 0 else int(below / k.alpha) + 1
    max_k = 0 if k.mu == 0 else int(below / k.beta) + 1
    for l in range(max_l + 1):
        for j in range(max_k + 1):
            base = k.gamma + l * k.alpha + j * k.beta
            if recip_gamma(base) == 0:
                continue
            out.update(round(base + m, 10) for m in range(int(below) + 1) if base + m < below)
    return sorted(out)


@lru_cache(maxsize=128)
def _grid_samples(k: PowerMLKernel, h: float, size: int, control: SeriesControl) -> np.ndarray:
    samples = k.series_factor(h * np.arange(size), control)
    samples.setflags(write=False)
    return samples


def kernel_convolution(
    k: PowerMLKernel, g: GridFunction, control: SeriesControl = GRID_CONTROL
) -> GridFunction:
    r"""Product-integration approximation of :math:`\int_{t_0}^{t} f(t-s)\,g(s)\,ds`.

    The kernel is Pascal-split into pieces with :math:`\gamma > 0` whose series
    factor deviates from a constant by :math:`O(\tau^e)` with :math:`\gamma + e \ge 2`.
    For each piece the factor :math:`\tau^{\gamma-1}` is integrated exactly.
    The product of the remaining series factor and ``g`` is taken as linear on
    every panel.
    """
    total = np.zeros(len(g))
    values = np.asarray(g.values)
    for piece in integrable_pieces(k, smooth=True):
        samples = _grid_samples(replace(piece, coef=1.0), g.h, len(g), control)
        scale = piece.coef * g.h**piece.gamma / (piece.gamma * (piece.gamma + 1))
        total += scale * _weighted_convolution(piece.gamma, samples, values)
    return g.with_values(total)
