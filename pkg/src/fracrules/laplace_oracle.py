r"""Numerical inverse Laplace transform of two-term transfer functions.

This module is an independent check on the series and quadrature code.  It
never calls the time-domain solvers.  Transforms are inverted along a fixed
Talbot contour

.. math::

    s(\theta) = c + r\theta(\cot\theta + i), \qquad -\pi < \theta < \pi,

in extended precision.  The shift ``c`` and radius ``r`` are chosen so that
every pole of the transfer function and of the forcing transform lies to the
left of the contour.  The branch cut of the principal powers lies on the
negative real axis, which the contour never crosses.  Each value is computed
at two resolutions, and a :class:`~fracrules.errors.ContourFailure` is raised
when the two disagree.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy import integrate

from fracrules.errors import (
    ContourFailure,
    PoleHit,
    UnsupportedForcing,
    ValidationError,
)
from fracrules.forcing import Forcing
from fracrules.special_functions import (
    DEFAULT_CONTROL,
    BivariateMLParams,
    MLParams,
    SeriesControl,
    bivariate_ml_univariate,
    ml3,
)

__all__ = [
    "ForcingTransform",
    "InversionConfig",
    "TransferSpec",
    "forcing_transform_catalog",
    "invert",
    "numerical_laplace",
    "oracle_solution",
    "series_inverse",
    "transfer_eval",
    "transform_of",
]

POLE_TOL = 1e-14
AGREEMENT_TOL = 1e-6
_MAX_NODES = 4096


@dataclass(frozen=True)
class TransferSpec:
    r"""A transfer function in one of two forms.

    ``binomial``: :math:`(s^\alpha - \lambda s^\beta)^{-(l+1)}` with ``power = l``.

    ``two_term``: :math:`s^\gamma / (s^\alpha - \mu s^\beta - \lambda)` with
    ``gamma_exp`` as :math:`\gamma`.
    """

    form: str
    alpha: float
    beta: float
    gamma_exp: float = 0.0
    lam: float = 0.0
    mu: float = 0.0
    power: int = 0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma_exp", "lam", "mu"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.form == "binomial":
            if not self.alpha > self.beta > 0:
                raise ValidationError(
                    f"binomial form needs alpha > beta > 0, got alpha={self.alpha}, beta={self.beta}"
                )
            if int(self.power) != self.power or self.power < 0:
                raise ValidationError(f"power must be an integer >= 0, got {self.power}")
            object.__setattr__(self, "power", int(self.power))
        elif self.form == "two_term":
            if not self.alpha > self.beta >= 0:
                raise ValidationError(
                    f"two-term form needs alpha > beta >= 0, got alpha={self.alpha}, beta={self.beta}"
                )
            if not self.alpha > self.gamma_exp:
                raise ValidationError(
                    f"two-term form needs alpha > gamma_exp, got {self.alpha} <= {self.gamma_exp}"
                )
        else:
            raise ValidationError(f"form must be 'binomial' or 'two_term', got {self.form!r}")

    @classmethod
    def binomial(cls, alpha: float, beta: float, lam: float, power: int = 0) -> TransferSpec:
        return cls("binomial", alpha, beta, lam=lam, power=power)

    @classmethod
    def two_term(
        cls, alpha: float, beta: float, gamma_exp: float = 0.0, lam: float = 0.0, mu: float = 0.0
    ) -> TransferSpec:
        return cls("two_term", alpha, beta, gamma_exp=gamma_exp, lam=lam, mu=mu)

    def poles(self) -> tuple[complex, ...]:
        """Zeros of the denominator on the principal sheet, excluding ``s = 0``."""
        if self.form == "binomial":
            return _binomial_poles(self.alpha - self.beta, self.lam)
        return _two_term_poles(self.alpha, self.beta, self.lam, self.mu)


@dataclass(frozen=True)
class InversionConfig:
    """Contour resolution ``M`` and an optional fixed radius ``scale``.

    With ``scale=None`` the radius is ``2 M / (5 t)``, raised when a pole needs
    more room.
    """

    M: int = 64
    scale: float | None = None

    def __post_init__(self) -> None:
        if int(self.M) != self.M or self.M < 16:
            raise ValidationError(f"contour node count M must be an integer >= 16, got {self.M}")
        object.__setattr__(self, "M", int(self.M))
        if self.scale is not None and not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"scale must be finite and > 0, got {self.scale}")


@dataclass(frozen=True)
class ForcingTransform:
    """A forcing transform together with the poles it adds."""

    function: Callable
    poles: tuple[complex, ...] = (0j,)

    def __call__(self, s):
        return self.function(s)


def _binomial_poles(d: float, lam: float) -> tuple[complex, ...]:
    # s^d = lam has roots |lam|^(1/d) exp(i (arg lam + 2 pi k) / d) with |arg s| < pi
    if lam == 0:
        return ()
    modulus = abs(lam) ** (1 / d)
    base = 0.0 if lam > 0 else math.pi
    poles = []
    k_max = int(math.ceil(d)) + 1
    for k in range(-k_max, k_max + 1):
        angle = (base + 2 * math.pi * k) / d
        if abs(angle) < math.pi - 1e-12:
            poles.append(modulus * complex(math.cos(angle), math.sin(angle)))
    return tuple(poles)


def _two_term_poles(alpha: float, beta: float, lam: float, mu: float) -> tuple[complex, ...]:
    """Roots of ``s^alpha - mu s^beta - lam`` by Newton in ``w = log s`` from a grid of starts."""
    if lam == 0 and mu == 0:
        return ()
    if lam == 0:
        return _binomial_poles(alpha - beta, mu)
    # every root with |s| >= 1 satisfies |s|^(alpha-beta) <= |mu| + |lam|
    radius = max(1.0, (abs(mu) + abs(lam)) ** (1 / (alpha - beta)))
    if beta == 0:
        return _binomial_poles(alpha, lam + mu)
    logr = np.linspace(math.log(1e-4), math.log(2 * radius), 24)
    phi = np.linspace(-math.pi, math.pi, 33)[1:-1]
    w = (logr[:, None] + 1j * phi[None, :]).ravel()
    with np.errstate(all="ignore"):
        for _ in range(80):
            ea, eb = np.exp(alpha * w), np.exp(beta * w)
            f = ea - mu * eb - lam
            df = alpha * ea - mu * beta * eb
            w = w - f / df
        ea, eb = np.exp(alpha * w), np.exp(beta * w)
        resid = np.abs(ea - mu * eb - lam) / (np.abs(ea) + abs(mu) * np.abs(eb) + abs(lam))
    ok = np.isfinite(w) & (np.abs(w.imag) < math.pi - 1e-9) & (resid < 1e-10) & (w.real > -30)
    found: list[complex] = []
    for s in np.exp(w[ok]):
        if all(abs(s - q) > 1e-7 * (1 + abs(q)) for q in found):
            found.append(complex(s))
    return tuple(sorted(found, key=lambda z: (z.real, z.imag)))


def _denominator(spec: TransferSpec, s):
    if spec.form == "binomial":
        return (mpmath.power(s, spec.alpha) - spec.lam * mpmath.power(s, spec.beta)) ** (
            spec.power + 1
        )
    return mpmath.power(s, spec.alpha) - spec.mu * mpmath.power(s, spec.beta) - spec.lam


def _numerator(spec: TransferSpec, s):
    if spec.form == "binomial":
        return mpmath.mpf(1)
    return mpmath.power(s, spec.gamma_exp)


def transfer_eval(spec: TransferSpec, s: complex) -> complex:
    """Transfer function at ``s`` with ``Re(s) > 0``, using principal-branch powers."""
    s = complex(s)
    if not s.real > 0:
        raise ValidationError(f"need Re(s) > 0, got s={s}")
    with mpmath.workdps(30):
        den = _denominator(spec, mpmath.mpc(s))
        if abs(den) < POLE_TOL:
            raise PoleHit(f"denominator {complex(den)} vanishes at s={s}")
        return complex(_numerator(spec, mpmath.mpc(s)) / den)


def forcing_transform_catalog(kind: str, value: float = 1.0) -> ForcingTransform:
    """Transform of ``constant`` c, ``exponential`` exp(a t) or ``monomial`` t^m."""
    value = float(value)
    if not math.isfinite(value):
        raise UnsupportedForcing(f"forcing parameter must be finite, got {value}")
    if kind == "constant":
        return transform_of(Forcing.constant(value))
    if kind == "exponential":
        return transform_of(Forcing.exponential(value))
    if kind == "monomial":
        if int(value) != value or value < 0:
            raise UnsupportedForcing(f"monomial degree must be an integer >= 0, got {value}")
        m = int(value)
        return transform_of(Forcing.polynomial(*([0.0] * m + [1.0])))
    raise UnsupportedForcing(f"no transform for forcing kind {kind!r}")


def transform_of(forcing: Forcing) -> ForcingTransform:
    if not isinstance(forcing, Forcing):
        raise UnsupportedForcing("the oracle needs a catalog forcing (const, poly or exp)")
    return ForcingTransform(forcing.laplace, forcing.poles)


def _talbot(F: Callable, t: float, shift: float, r: float, M: int) -> mpmath.mpf:
    t = mpmath.mpf(t)
    c, r = mpmath.mpf(shift), mpmath.mpf(r)
    total = F(c + r) * mpmath.exp(r * t) / 2
    for k in range(1, M):
        theta = k * mpmath.pi / M
        cot = mpmath.cot(theta)
        s = c + r * theta * (cot + 1j)
        sigma = theta + (theta * cot - 1) * cot
        total += (mpmath.exp(t * (s - c)) * F(s) * (1 + 1j * sigma)).real
    return mpmath.exp(c * t) * r / M * total


def _left_of_contour(p: complex, shift: float, r: float, margin: float) -> bool:
    y = abs(p.imag)
    if y >= r * math.pi:
        return False
    theta = y / r
    edge = shift + (r if theta == 0 else y / math.tan(theta))
    return p.real < edge - margin


def _contour(poles: tuple[complex, ...], t: float, cfg: InversionConfig) -> tuple[float, float, int]:
    shift = max([0.0] + [p.real for p in poles])
    need = 0.0
    for p in poles:
        # keep complex poles well inside: theta = |Im p| / r <= pi / 4
        need = max(need, 4 * abs(p.imag) / math.pi)
    if cfg.scale is not None:
        r = cfg.scale
        nodes = cfg.M
    else:
        nodes = max(cfg.M, math.ceil(2.5 * need * t))
        r = 2 * nodes / (5 * t)
    if nodes > _MAX_NODES:
        raise ContourFailure(f"pole layout needs {nodes} contour nodes at t={t}")
    for p in poles:
        if not _left_of_contour(p, shift, r, 1e-9 * (1 + abs(p))):
            raise ContourFailure(f"pole {p} is not enclosed by the contour (r={r}, shift={shift})")
    return shift, r, nodes


def _invert_once(F: Callable, t: float, shift: float, r: float, M: int) -> float:
    digits = 30 + math.ceil(0.8 * M) + math.ceil(r * t / math.log(10))
    with mpmath.workdps(digits):
        return float(_talbot(F, t, shift, r, M))


def invert(
    spec: TransferSpec,
    forcing_transform: ForcingTransform | Callable | None,
    t: float,
    cfg: InversionConfig = InversionConfig(),
) -> float:
    """Inverse transform of the transfer function (times the forcing transform) at ``t``.

    A plain callable forcing transform is assumed to be singular only at
    ``s = 0``.  The value at ``M`` nodes is compared with the value at ``2 M``
    nodes and the latter is returned.
    """
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise ValidationError(f"t must be finite and > 0, got {t}")
    poles = list(spec.poles())
    if forcing_transform is not None:
        poles += list(getattr(forcing_transform, "poles", (0j,)))

    def F(s):
        den = _denominator(spec, s)
        if abs(den) < POLE_TOL:
            raise PoleHit(f"contour node {complex(s)} lies on a pole")
        value = _numerator(spec, s) / den
        if forcing_transform is not None:
            value *= forcing_transform(s)
        return value

    shift, r, nodes = _contour(tuple(poles), t, cfg)
    coarse = _invert_once(F, t, shift, r, nodes)
    fine_r = r if cfg.scale is not None else r * 2
    fine = _invert_once(F, t, shift, fine_r, 2 * nodes)
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        raise ContourFailure(f"contour sum is not finite at t={t}")
    if abs(fine - coarse) > AGREEMENT_TOL * max(abs(fine), 1e-8):
        raise ContourFailure(
            f"contour estimates disagree at t={t}: {coarse!r} (M={nodes}) vs {fine!r} (M={2 * nodes})"
        )
    return fine


def oracle_solution(p, t: float, cfg: InversionConfig = InversionConfig()) -> float:
    """Zero-data solution of a :class:`~fracrules.solvers.BagleyTorvikProblem` at ``t``.

    Both senses give the same transform when the initial data vanish.
    """
    if not isinstance(p.g, Forcing):
        raise UnsupportedForcing("the oracle needs a catalog forcing (const, poly or exp)")
    spec = TransferSpec.two_term(p.alpha, p.beta, 0.0, p.lam, p.mu)
    if p.g.is_zero():
        return 0.0
    return invert(spec, transform_of(p.g), t, cfg)


def series_inverse(
    spec: TransferSpec, t: float, control: SeriesControl = DEFAULT_CONTROL
) -> float:
    """The same inverse transform written as a Mittag-Leffler series.

    ``binomial``: :math:`t^{(l+1)\\alpha-1}E^{l+1}_{\\alpha-\\beta,(l+1)\\alpha}(\\lambda t^{\\alpha-\\beta})`.
    ``two_term``: :math:`t^{\\alpha-\\gamma-1}E_{\\alpha,\\alpha-\\beta,\\alpha-\\gamma}(\\lambda t^\\alpha, \\mu t^{\\alpha-\\beta})`.
    """
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise ValidationError(f"t must be finite and > 0, got {t}")
    a, b = spec.alpha, spec.beta
    if spec.form == "binomial":
        k = spec.power + 1
        params = MLParams(a - b, k * a, float(k))
        return t ** (k * a - 1) * ml3(params, spec.lam * t ** (a - b), control)
    params = BivariateMLParams(a, a - b, a - spec.gamma_exp)
    return bivariate_ml_univariate(params, spec.lam, spec.mu, t, control)


def numerical_laplace(values: np.ndarray, h: float, s: float) -> float:
    """Trapezoid forward transform of samples on ``0, h, 2h, ...`` at real ``s > 0``.

    The integral is cut off at the end of the grid, so the grid must be long
    enough for ``exp(-s T)`` to be negligible.
    """
    values = np.asarray(values, dtype=float)
    t = h * np.arange(values.size)
    weights = np.exp(-s * t)
    return float(integrate.trapezoid(values * weights, dx=h))
