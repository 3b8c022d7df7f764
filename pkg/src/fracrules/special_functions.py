r"""Gamma utilities and the Mittag-Leffler / Fox-Wright family.

Every function here is evaluated by direct series summation under a
:class:`SeriesControl`.  Terms are formed in log space so that large powers and
large gamma values never overflow on their own.  When the partial sums show
heavy cancellation (the sum of magnitudes dwarfs the sum itself), the series
is summed again in extended precision with :mod:`mpmath`.  Without that second
pass, alternating series such as :math:`E_{\alpha,\beta}(-20)` would lose
every significant digit.
"""

from __future__ import annotations

import math
import os
from collections.abc import Callable
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np
from scipy import special

from fracrules.errors import (
    DivergentParameters,
    NonConvergence,
    SingularAtZero,
    ValidationError,
)

__all__ = [
    "BivariateMLParams",
    "FoxWrightParams",
    "MLParams",
    "SeriesControl",
    "bivariate_kernel_values",
    "bivariate_ml",
    "bivariate_ml_univariate",
    "fox_wright",
    "h_foxwright",
    "h_podlubny",
    "ml2",
    "ml2_deriv",
    "ml3",
    "recip_gamma",
]

# below this magnitude a partial sum counts as zero for the stopping rule
ABS_FLOOR = 1e-300
# exp() overflows past this
_LOG_MAX = 700.0
_FIRST_CHUNK = 32
_MAX_CHUNK = 512
_MAX_DIGITS = 3000
_EPS = np.finfo(float).eps
_EULER_GAMMA = 0.5772156649015329


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class SeriesControl:
    """Termination policy shared by every series in this package."""

    rel_tol: float = 1e-14
    """A term is *small* once ``|term| <= rel_tol * |partial sum|``."""
    consecutive_small: int = 3
    """Number of successive small terms that ends the summation."""
    max_terms: int = 2000
    """Hard cap on the number of terms per summation index."""
    cancellation_limit: float = 1e4
    """Ratio ``sum(|terms|) / |sum|`` above which the series is re-summed in
    extended precision."""
    float_error_target: float = 1e-13
    """Estimated relative rounding error of the double-precision sum above
    which it is also re-summed in extended precision.  Each term is formed in
    log space, so its relative error grows with the size of its logarithm."""

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ValidationError(f"rel_tol must be > 0, got {self.rel_tol}")
        if self.consecutive_small < 1:
            raise ValidationError("consecutive_small must be >= 1")
        if self.max_terms < 1:
            raise ValidationError(f"max_terms must be >= 1, got {self.max_terms}")
        if not self.cancellation_limit >= 1:
            raise ValidationError("cancellation_limit must be >= 1")
        if not self.float_error_target > 0:
            raise ValidationError("float_error_target must be > 0")

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> SeriesControl:
        """Default control, with ``rel_tol`` taken from ``FRACRULES_RELTOL`` if set."""
        env = os.environ if environ is None else environ
        raw = env.get("FRACRULES_RELTOL")
        if raw is None or raw.strip() == "":
            return cls()
        try:
            rel_tol = float(raw)
        except ValueError as exc:
            raise ValidationError(f"FRACRULES_RELTOL is not a number: {raw!r}") from exc
        return cls(rel_tol=rel_tol)


DEFAULT_CONTROL = SeriesControl()


@dataclass(frozen=True)
class MLParams:
    r"""Parameters of :math:`E^{\gamma}_{\alpha,\beta}`; ``gamma_p`` is the
    Prabhakar exponent and defaults to the two-parameter case."""

    alpha: float
    beta: float
    gamma_p: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma_p"):
            object.__setattr__(self, name, _check_finite(name, getattr(self, name)))
        if not self.alpha > 0:
            raise ValidationError(f"alpha must be > 0, got {self.alpha}")


@dataclass(frozen=True)
class BivariateMLParams:
    r"""Parameters of the bivariate function :math:`E^{\delta}_{\alpha,\beta,\gamma}(u, v)`."""

    alpha: float
    beta: float
    gamma: float
    delta: float = 1.0

    def __post_init__(self) -> None:
        for name in ("alpha", "beta", "gamma", "delta"):
            object.__setattr__(self, name, _check_finite(name, getattr(self, name)))
        if not (self.alpha > 0 and self.beta > 0):
            raise ValidationError(
                f"alpha and beta must be > 0, got alpha={self.alpha}, beta={self.beta}"
            )


@dataclass(frozen=True)
class FoxWrightParams:
    """Upper pairs ``(lambda_i, alpha_i)`` and lower pairs ``(mu_j, beta_j)``."""

    upper: tuple[tuple[float, float], ...] = field(default_factory=tuple)
    lower: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        upper = tuple((float(a), float(b)) for a, b in self.upper)
        lower = tuple((float(a), float(b)) for a, b in self.lower)
        for a, b in upper + lower:
            _check_finite("Fox-Wright parameter", a)
            _check_finite("Fox-Wright parameter", b)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower", lower)

    @property
    def excess(self) -> float:
        """``sum(beta_j) - sum(alpha_i)``; the series converges when this exceeds -1."""
        return sum(b for _, b in self.lower) - sum(a for _, a in self.upper)


def recip_gamma(x: float) -> float:
    r"""Return :math:`1/\Gamma(x)`, exactly ``0.0`` at the poles of :math:`\Gamma`."""
    x = float(x)
    if 0 < abs(x) < 1e-8:
        # scipy flushes tiny negative arguments to zero; the Taylor series is exact here
        return x * (1 + _EULER_GAMMA * x)
    return float(special.rgamma(x))


def _gamma_sign(x: np.ndarray) -> np.ndarray:
    """Sign of 1/Gamma(x), zero at the poles."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return np.where(x > 0, 1.0, np.sign(special.rgamma(x)))


def _log_abs_gamma(x: np.ndarray) -> np.ndarray:
    return special.gammaln(np.asarray(x, dtype=float))


def _first_active(start: float, step: float) -> int:
    """Smallest index ``i`` with ``start + i * step > 0``."""
    if start > 0:
        return 0
    return int(math.floor(-start / step)) + 1


def _is_small(term: float, total: float, rel_tol: float) -> bool:
    if total == 0:
        return abs(term) <= ABS_FLOOR
    return abs(term) <= rel_tol * abs(total)


def _digits_for(abs_total: float, total: float, max_log: float) -> int:
    """Working precision needed to absorb the observed cancellation."""
    if max_log > _LOG_MAX:
        lost = max_log / math.log(10) + 20
    elif total == 0:
        lost = 30 + max(0.0, math.log10(abs_total)) if abs_total > 0 else 0.0
    else:
        lost = math.log10(max(abs_total / abs(total), 1.0))
    return int(min(_MAX_DIGITS, 25 + math.ceil(lost)))


def _float_sum_ok(total, abs_total, err_total, control: SeriesControl):
    """Whether a double-precision sum can be trusted (works elementwise on arrays)."""
    scale = np.abs(total)
    return (abs_total <= control.cancellation_limit * scale) & (
        _EPS * err_total <= control.float_error_target * scale
    )


def _to_float(value: mpmath.mpf) -> float:
    out = float(value)
    if not math.isfinite(out):
        raise NonConvergence("series value exceeds the floating-point range")
    return out


# coefficient providers map an index array to (log|c_i|, sign(c_i))
CoefProvider = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def _power_series(
    coef: CoefProvider,
    mp_coef: Callable[[int], mpmath.mpf],
    z: float,
    control: SeriesControl,
    active_from: int = 0,
) -> float:
    r"""Sum :math:`\sum_i c_i z^i` under ``control``."""
    z = float(z)
    if z == 0.0:
        logc, sgn = coef(np.arange(1))
        return float(sgn[0] * math.exp(logc[0]))

    logz = math.log(abs(z))
    total = 0.0
    abs_total = 0.0
    err_total = 0.0
    max_log = -math.inf
    run = 0
    start = 0
    size = _FIRST_CHUNK
    finished = False
    while start < control.max_terms and not finished:
        stop = min(start + size, control.max_terms)
        idx = np.arange(start, stop)
        logc, sgn = coef(idx)
        with np.errstate(invalid="ignore"):
            logt = logc + idx * logz
        chunk_max = float(np.max(logt))
        max_log = max(max_log, chunk_max)
        if max_log > _LOG_MAX:
            break
        terms = sgn * np.exp(logt)
        if z < 0:
            terms = np.where(idx % 2 == 1, -terms, terms)
        with np.errstate(invalid="ignore"):
            weights = np.abs(logc) + np.abs(idx * logz) + 1
        err_terms = np.where(terms == 0, 0.0, np.abs(terms) * weights)
        for j, term in enumerate(terms):
            total += float(term)
            abs_total += abs(float(term))
            err_total += float(err_terms[j])
            if start + j >= active_from and _is_small(term, total, control.rel_tol):
                run += 1
            else:
                run = 0
            if run >= control.consecutive_small:
                finished = True
                break
        start = stop
        size = min(2 * size, _MAX_CHUNK)

    if max_log <= _LOG_MAX:
        if not finished:
            raise NonConvergence(
                f"series did not converge within {control.max_terms} terms (z={z})"
            )
        if _float_sum_ok(total, abs_total, err_total, control):
            return total

    digits = _digits_for(abs_total, total, max_log)
    return _power_series_mp(mp_coef, z, control, active_from, digits)


def _power_series_mp(
    mp_coef: Callable[[int], mpmath.mpf],
    z: float,
    control: SeriesControl,
    active_from: int,
    digits: int,
) -> float:
    while True:
        total, abs_total = _power_series_mp_pass(mp_coef, z, control, active_from, digits)
        needed = _digits_for(float(abs_total), float(total), 0.0)
        if needed <= digits or digits >= _MAX_DIGITS:
            return _to_float(total)
        digits = needed


def _power_series_mp_pass(
    mp_coef: Callable[[int], mpmath.mpf],
    z: float,
    control: SeriesControl,
    active_from: int,
    digits: int,
) -> tuple[mpmath.mpf, mpmath.mpf]:
    with mpmath.workdps(digits):
        zz = mpmath.mpf(z)
        power = mpmath.mpf(1)
        total = mpmath.mpf(0)
        abs_total = mpmath.mpf(0)
        run = 0
        for i in range(control.max_terms):
            term = mp_coef(i) * power
            total += term
            abs_total += abs(term)
            small = abs(term) <= ABS_FLOOR if total == 0 else abs(term) <= control.rel_tol * abs(total)
            run = run + 1 if (i >= active_from and small) else 0
            if run >= control.consecutive_small:
                return +total, +abs_total
            power *= zz
    raise NonConvergence(
        f"series did not converge within {control.max_terms} terms (z={z})"
    )


def _mp_rgamma(x: mpmath.mpf) -> mpmath.mpf:
    return mpmath.rgamma(x)


def ml2(params: MLParams, t: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    r"""Two-parameter Mittag-Leffler function.

    .. math::

        E_{\alpha,\beta}(t) = \sum_{i=0}^\infty \frac{t^i}{\Gamma(i\alpha + \beta)}.

    ``params.gamma_p`` is ignored.
    """
    a, b = params.alpha, params.beta

    def coef(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = idx * a + b
        return -_log_abs_gamma(x), _gamma_sign(x)

    def mp_coef(i: int) -> mpmath.mpf:
        return _mp_rgamma(i * mpmath.mpf(a) + mpmath.mpf(b))

    return _power_series(coef, mp_coef, t, control, _first_active(b, a))


def _pochhammer_ratio(gamma_p: float, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log|(gamma_p)_i / i!| and its sign, by a running product from i = 0."""
    stop = int(idx[-1]) + 1
    j = np.arange(1, stop, dtype=float)
    factors = (gamma_p + j - 1) / j
    with np.errstate(divide="ignore"):
        logs = np.concatenate(([0.0], np.cumsum(np.log(np.abs(factors)))))
    signs = np.concatenate(([1.0], np.cumprod(np.sign(factors))))
    return logs[idx], signs[idx]


def ml3(params: MLParams, t: float, control: SeriesControl = DEFAULT_CONTROL) -> float:
    r"""Three-parameter (Prabhakar) Mittag-Leffler function.

    .. math::

        E^{\gamma}_{\alpha,\beta}(t) = \sum_{i=0}^\infty
            \frac{(\gamma)_i}{i!} \frac{t^i}{\Gamma(i\alpha + \beta)}.
    """
    a, b, g = params.alpha, params.beta, params.gamma_p

    def coef(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        logp, sgnp = _pochhammer_ratio(g, idx)
        x = idx * a + b
        return logp - _log_abs_gamma(x), sgnp * _gamma_sign(x)

    def mp_coef(i: int) -> mpmath.mpf:
        ratio = mpmath.rf(mpmath.mpf(g), i) / mpmath.factorial(i)
        return ratio * _mp_rgamma(i * mpmath.mpf(a) + mpmath.mpf(b))

    return _power_series(coef, mp_coef, t, control, _first_active(b, a))


def ml2_deriv(
    l: int, params: MLParams, t: float, control: SeriesControl = DEFAULT_CONTROL
) -> float:
    r"""``l``-th derivative of :math:`E_{\alpha,\beta}`.

    .. math::

        E^{(l)}_{\alpha,\beta}(t) = \sum_{i=0}^\infty
            \frac{(i+l)!}{i!} \frac{t^i}{\Gamma(i\alpha + l\alpha + \beta)}.
    """
    if int(l) != l or l < 0:
        raise ValidationError(f"derivative order l must be a non-negative integer, got {l}")
    l = int(l)
    a, b = params.alpha, params.beta
    shift = l * a + b

    def coef(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = idx * a + shift
        logfac = special.gammaln(idx + l + 1.0) - special.gammaln(idx + 1.0)
        return logfac - _log_abs_gamma(x), _gamma_sign(x)

    def mp_coef(i: int) -> mpmath.mpf:
        return mpmath.rf(i + 1, l) * _mp_rgamma(
            i * mpmath.mpf(a) + l * mpmath.mpf(a) + mpmath.mpf(b)
        )

    return _power_series(coef, mp_coef, t, control, _first_active(shift, a))


def _mp_bivariate(
    alpha: float,
    beta: float,
    gamma: float,
    delta: float,
    u: float,
    v: float,
    control: SeriesControl,
    digits: int,
    cache: dict[int, dict[tuple[int, int], mpmath.mpf]],
) -> float:
    """Extended-precision anti-diagonal summation for a single point."""
    while True:
        total, abs_total = _mp_bivariate_pass(
            alpha, beta, gamma, delta, u, v, control, digits, cache.setdefault(digits, {})
        )
        needed = _digits_for(float(abs_total), float(total), 0.0)
        if needed <= digits or digits >= _MAX_DIGITS:
            return _to_float(total)
        digits = needed


def _mp_bivariate_pass(
    alpha: float,
    beta: float,
    gamma: float,
    delta: float,
    u: float,
    v: float,
    control: SeriesControl,
    digits: int,
    cache: dict[tuple[int, int], mpmath.mpf],
) -> tuple[mpmath.mpf, mpmath.mpf]:
    active_from = _first_active(gamma, min(alpha, beta))
    with mpmath.workdps(digits):
        a, b, g, d = (mpmath.mpf(x) for x in (alpha, beta, gamma, delta))
        uu, vv = mpmath.mpf(u), mpmath.mpf(v)
        upow = [mpmath.mpf(1)]
        vpow = [mpmath.mpf(1)]
        fact = [mpmath.mpf(1)]
        poch = mpmath.mpf(1)
        total = mpmath.mpf(0)
        abs_total = mpmath.mpf(0)
        run = 0
        for n in range(control.max_terms):
            if n > 0:
                poch *= d + n - 1
                upow.append(upow[-1] * uu)
                vpow.append(vpow[-1] * vv)
                fact.append(fact[-1] * n)
            diag = mpmath.mpf(0)
            diag_abs = mpmath.mpf(0)
            if poch != 0:
                for k in range(n + 1):
                    l = n - k
                    if (l and uu == 0) or (k and vv == 0):
                        continue
                    key = (l, k)
                    rg = cache.get(key)
                    if rg is None:
                        rg = mpmath.rgamma(l * a + k * b + g)
                        cache[key] = rg
                    term = poch * upow[l] * vpow[k] * rg / (fact[l] * fact[k])
                    diag += term
                    diag_abs += abs(term)
            total += diag
            abs_total += diag_abs
            small = diag_abs <= ABS_FLOOR if total == 0 else diag_abs <= control.rel_tol * abs(total)
            run = run + 1 if (n >= active_from and small) or poch == 0 else 0
            if run >= control.consecutive_small:
                return +total, +abs_total
    raise NonConvergence(
        f"bivariate series did not converge within {control.max_terms} anti-diagonals"
    )


def _bivariate_series(
    params: BivariateMLParams,
    u: np.ndarray,
    v: np.ndarray,
    control: SeriesControl,
) -> np.ndarray:
    """Vectorised anti-diagonal summation of the bivariate series over points."""
    alpha, beta, gamma, delta = params.alpha, params.beta, params.gamma, params.delta
    u = np.atleast_1d(np.asarray(u, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    u, v = np.broadcast_arrays(u, v)
    u = u.ravel()
    v = v.ravel()
    npts = u.size
    with np.errstate(divide="ignore"):
        logu = np.log(np.abs(u))
        logv = np.log(np.abs(v))
    su = np.sign(u)
    sv = np.sign(v)

    total = np.zeros(npts)
    abs_total = np.zeros(npts)
    err_total = np.zeros(npts)
    max_log = np.full(npts, -np.inf)
    run = np.zeros(npts, dtype=int)
    done = np.zeros(npts, dtype=bool)
    overflow = np.zeros(npts, dtype=bool)
    active_from = _first_active(gamma, min(alpha, beta))

    log_poch = 0.0
    poch_sign = 1.0
    for n in range(control.max_terms):
        if n > 0:
            factor = delta + n - 1
            if factor == 0:
                poch_sign = 0.0
            else:
                log_poch += math.log(abs(factor))
                poch_sign *= math.copysign(1.0, factor)
        pending = ~(done | overflow)
        if not pending.any():
            break
        k = np.arange(n + 1, dtype=float)
        l = n - k
        x = l * alpha + k * beta + gamma
        logc = log_poch - special.gammaln(l + 1) - special.gammaln(k + 1) - _log_abs_gamma(x)
        sgnc = poch_sign * _gamma_sign(x)

        p = np.flatnonzero(pending)
        with np.errstate(invalid="ignore"):
            lu = np.where(l[None, :] == 0, 0.0, l[None, :] * logu[p, None])
            lv = np.where(k[None, :] == 0, 0.0, k[None, :] * logv[p, None])
        logt = logc[None, :] + lu + lv
        row_max = np.max(logt, axis=1)
        max_log[p] = np.maximum(max_log[p], row_max)
        blown = row_max > _LOG_MAX
        if blown.any():
            overflow[p[blown]] = True
        sign = sgnc[None, :] * su[p, None] ** l[None, :] * sv[p, None] ** k[None, :]
        terms = np.where(sgnc[None, :] == 0, 0.0, sign * np.exp(np.minimum(logt, _LOG_MAX)))
        diag = terms.sum(axis=1)
        diag_abs = np.abs(terms).sum(axis=1)
        with np.errstate(invalid="ignore"):
            weights = np.abs(logc)[None, :] + np.abs(lu) + np.abs(lv) + 1
            err_total[p] += np.where(terms == 0, 0.0, np.abs(terms) * weights).sum(axis=1)
        total[p] += diag
        abs_total[p] += diag_abs
        tot = total[p]
        small = np.where(tot == 0, diag_abs <= ABS_FLOOR, diag_abs <= control.rel_tol * np.abs(tot))
        if n < active_from and poch_sign != 0:
            small[:] = False
        run[p] = np.where(small, run[p] + 1, 0)
        done[p] = (run[p] >= control.consecutive_small) & ~overflow[p]
    else:
        if (~(done | overflow)).any():
            raise NonConvergence(
                f"bivariate series did not converge within {control.max_terms} anti-diagonals"
            )

    result = total.copy()
    precise = overflow | ~_float_sum_ok(total, abs_total, err_total, control)
    if precise.any():
        idx = np.flatnonzero(precise)
        digits = max(_digits_for(abs_total[i], total[i], max_log[i]) for i in idx)
        cache: dict[int, dict[tuple[int, int], mpmath.mpf]] = {}
        for i in idx:
            result[i] = _mp_bivariate(
                alpha, beta, gamma, delta, u[i], v[i], control, digits, cache
            )
    return result


def bivariate_ml(
    params: BivariateMLParams, u: float, v: float, control: SeriesControl = DEFAULT_CONTROL
) -> float:
    r"""Bivariate Mittag-Leffler function.

    .. math::

        E^{\delta}_{\alpha,\beta,\gamma}(u, v) = \sum_{l=0}^\infty \sum_{k=0}^\infty
            \frac{(\delta)_{l+k}}{l!\,k!}
            \frac{u^l v^k}{\Gamma(l\alpha + k\beta + \gamma)},

    summed along anti-diagonals :math:`l + k = n`.  For :math:`\delta = 1`
    the weight reduces to the binomial coefficient :math:`\binom{l+k}{k}`.
    """
    u = _check_finite("u", u)
    v = _check_finite("v", v)
    return float(_bivariate_series(params, np.array([u]), np.array([v]), control)[0])


def bivariate_kernel_values(
    params: BivariateMLParams,
    lam: float,
    mu: float,
    tau: np.ndarray,
    control: SeriesControl = DEFAULT_CONTROL,
) -> np.ndarray:
    r"""Evaluate :math:`E_{\alpha,\beta,\gamma}(\lambda\tau^\alpha, \mu\tau^\beta)`
    on an array of :math:`\tau \ge 0` (without the :math:`\tau^{\gamma-1}` factor)."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0) or not np.all(np.isfinite(tau)):
        raise ValidationError("tau must be finite and non-negative")
    u = lam * tau**params.alpha
    v = mu * tau**params.beta
    return _bivariate_series(params, u, v, control).reshape(tau.shape)


def bivariate_ml_univariate(
    params: BivariateMLParams,
    lam: float,
    mu: float,
    t: float,
    control: SeriesControl = DEFAULT_CONTROL,
) -> float:
    r"""Univariate form :math:`t^{\gamma-1} E_{\alpha,\beta,\gamma}(\lambda t^\alpha, \mu t^\beta)`.

    At :math:`t = 0` the value is ``0`` for :math:`\gamma > 1` and
    :math:`1/\Gamma(1) = 1` for :math:`\gamma = 1`; for :math:`\gamma < 1` the
    power factor blows up and :class:`~fracrules.errors.SingularAtZero` is raised.
    """
    t = _check_finite("t", t)
    if t < 0:
        raise ValidationError(f"t must be >= 0, got {t}")
    if t == 0:
        if params.gamma > 1:
            return 0.0
        if params.gamma == 1:
            return recip_gamma(1.0)
        raise SingularAtZero(f"t^(gamma-1) is singular at 0 for gamma={params.gamma}")
    inner = bivariate_kernel_values(params, lam, mu, np.array([t]), control)[0]
    return float(t ** (params.gamma - 1) * inner)


def fox_wright(
    params: FoxWrightParams, t: float, control: SeriesControl = DEFAULT_CONTROL
) -> float:
    r"""Fox-Wright function.

    .. math::

        {}_p\Psi_q(t) = \sum_{k=0}^\infty
            \frac{\prod_i \Gamma(\lambda_i + \alpha_i k)}{\prod_j \Gamma(\mu_j + \beta_j k)}
            \frac{t^k}{k!}

    Raises :class:`~fracrules.errors.DivergentParameters` unless
    :math:`\sum_j \beta_j - \sum_i \alpha_i > -1`.
    """
    if not params.excess > -1:
        raise DivergentParameters(
            f"sum(beta_j) - sum(alpha_i) = {params.excess} must exceed -1"
        )
    upper, lower = params.upper, params.lower

    def coef(idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        k = idx.astype(float)
        logc = -special.gammaln(k + 1)
        sgn = np.ones_like(k)
        for lam_i, a_i in upper:
            x = lam_i + a_i * k
            if np.any(_gamma_sign(x) == 0):
                raise DivergentParameters(f"upper gamma argument hits a pole at {lam_i}+{a_i}k")
            logc = logc + _log_abs_gamma(x)
            sgn = sgn * _gamma_sign(x)
        for mu_j, b_j in lower:
            x = mu_j + b_j * k
            logc = logc - _log_abs_gamma(x)
            sgn = sgn * _gamma_sign(x)
        return logc, sgn

    def mp_coef(k: int) -> mpmath.mpf:
        value = 1 / mpmath.factorial(k)
        for lam_i, a_i in upper:
            value *= mpmath.gamma(mpmath.mpf(lam_i) + mpmath.mpf(a_i) * k)
        for mu_j, b_j in lower:
            value *= mpmath.rgamma(mpmath.mpf(mu_j) + mpmath.mpf(b_j) * k)
        return value

    active_from = 0
    for base, step in upper + lower:
        if step > 0:
            active_from = max(active_from, _first_active(base, step))
    return _power_series(coef, mp_coef, t, control, active_from)


def _h_series(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    t: float,
    control: SeriesControl,
    inner: Callable[[int, float], float],
    mp_inner: Callable[[int, float, int, SeriesControl], mpmath.mpf],
) -> float:
    """Outer sum over ``l`` of ``(lam t^alpha)^l / l! * inner(l, mu t^(alpha-beta))``.

    ``mp_inner(l, z, digits, control)`` recomputes an inner value in extended
    precision for the re-summation that follows heavy cancellation.  The inner
    series are then truncated near the working precision, since the outer
    cancellation amplifies their truncation error too.
    """
    for name, value in (("alpha", alpha), ("beta", beta), ("lambda", lam), ("mu", mu), ("t", t)):
        _check_finite(name, value)
    if not t > 0:
        raise ValidationError(f"t must be > 0, got {t}")
    if not alpha > beta > 0:
        raise ValidationError(f"need alpha > beta > 0, got alpha={alpha}, beta={beta}")
    z = mu * t ** (alpha - beta)
    x = lam * t**alpha
    total = 0.0
    abs_total = 0.0
    scale = 1.0
    run = 0
    for l in range(control.max_terms):
        term = scale * inner(l, z) if scale != 0 else 0.0
        total += term
        abs_total += abs(term)
        run = run + 1 if _is_small(term, total, control.rel_tol) else 0
        if run >= control.consecutive_small:
            break
        scale *= x / (l + 1)
    else:
        raise NonConvergence(f"outer series did not converge within {control.max_terms} terms")
    # inner values carry about rel_tol relative error each
    inner_err = abs_total * control.rel_tol / _EPS
    if _float_sum_ok(total, abs_total, inner_err, control):
        return total

    digits = _digits_for(abs_total, total, 0.0) + 10
    while True:
        inner_control = replace(control, rel_tol=min(control.rel_tol, 10.0 ** (5 - digits)))
        with mpmath.workdps(digits):
            xx = mpmath.mpf(x)
            scale = mpmath.mpf(1)
            total_mp = mpmath.mpf(0)
            abs_mp = mpmath.mpf(0)
            run = 0
            for l in range(control.max_terms):
                term = scale * mp_inner(l, z, digits, inner_control)
                total_mp += term
                abs_mp += abs(term)
                small = abs(term) <= control.rel_tol * abs(total_mp) if total_mp != 0 else term == 0
                run = run + 1 if small else 0
                if run >= control.consecutive_small:
                    break
                scale *= xx / (l + 1)
            else:
                raise NonConvergence(
                    f"outer series did not converge within {control.max_terms} terms"
                )
        needed = _digits_for(float(abs_mp), float(total_mp), 0.0) + 10
        if needed <= digits or digits >= _MAX_DIGITS:
            return _to_float(total_mp)
        digits = needed


def h_podlubny(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    t: float,
    control: SeriesControl = DEFAULT_CONTROL,
) -> float:
    r"""Green-kernel factor written with derivatives of two-parameter functions.

    .. math::

        H(t) = \sum_{l=0}^\infty \frac{\lambda^l t^{l\alpha}}{l!}
            E^{(l)}_{\alpha-\beta,\,\alpha+l\beta}(\mu t^{\alpha-\beta}),

    so that the Green kernel equals :math:`t^{\alpha-1} H(t)`.
    """

    def inner(l: int, z: float) -> float:
        return ml2_deriv(l, MLParams(alpha - beta, alpha + l * beta), z, control)

    def mp_inner(l: int, z: float, digits: int, ctl: SeriesControl) -> mpmath.mpf:
        a = mpmath.mpf(alpha) - mpmath.mpf(beta)
        shift = l * a + mpmath.mpf(alpha) + l * mpmath.mpf(beta)

        def mp_coef(i: int) -> mpmath.mpf:
            return mpmath.rf(i + 1, l) * mpmath.rgamma(i * a + shift)

        start = _first_active(float(shift), alpha - beta)
        return _power_series_mp_pass(mp_coef, z, ctl, start, digits)[0]

    return _h_series(alpha, beta, lam, mu, t, control, inner, mp_inner)


def h_foxwright(
    alpha: float,
    beta: float,
    lam: float,
    mu: float,
    t: float,
    control: SeriesControl = DEFAULT_CONTROL,
) -> float:
    r"""Same factor as :func:`h_podlubny`, with each term written as
    :math:`{}_1\Psi_1[(l+1, 1); (l\alpha+\alpha, \alpha-\beta)](\mu t^{\alpha-\beta})`."""

    def inner(l: int, z: float) -> float:
        params = FoxWrightParams(
            upper=((l + 1.0, 1.0),), lower=((l * alpha + alpha, alpha - beta),)
        )
        return fox_wright(params, z, control)

    def mp_inner(l: int, z: float, digits: int, ctl: SeriesControl) -> mpmath.mpf:
        lower = (l + 1) * mpmath.mpf(alpha)
        step = mpmath.mpf(alpha) - mpmath.mpf(beta)

        def mp_coef(k: int) -> mpmath.mpf:
            return mpmath.gamma(l + 1 + k) * mpmath.rgamma(lower + step * k) / mpmath.factorial(k)

        start = _first_active(l * alpha + alpha, alpha - beta)
        return _power_series_mp_pass(mp_coef, z, ctl, start, digits)[0]

    return _h_series(alpha, beta, lam, mu, t, control, inner, mp_inner)

