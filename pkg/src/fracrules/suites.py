"""Fixed verification suites shared by ``fracrules verify`` and the acceptance tests.

Each suite runs a fixed parameter matrix and returns a :class:`SuiteResult`.
Random parameter sets come from a seeded generator, so every run sees the
same cases.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from fracrules.forcing import Forcing
from fracrules.frac_operators import (
    BOUNDARY_LAYER,
    FracOrder,
    GridFunction,
    rl_caputo_relation_check,
)
from fracrules.laplace_oracle import TransferSpec, invert, series_inverse
from fracrules.leibniz import (
    ConvolutionProblem,
    LeibnizReport,
    caputo_leibniz_check,
    caputo_rl_coincidence_check,
    classical_leibniz_check,
    rl_caputo_relation_theorem_check,
    rl_leibniz_check,
)
from fracrules.solvers import green_kernel, green_kernel_of
from fracrules.special_functions import h_foxwright, h_podlubny

__all__ = ["SUITES", "CaseResult", "SuiteResult", "run_suite"]

GREEN_ORDERS = ((1.5, 0.5), (1.2, 0.8), (2.0, 1.0))
GREEN_LAM = GREEN_MU = -1.0
HORIZON = 5.0
RESOLUTION = 1024
RESIDUAL_TOL = 5e-2
# below this both residuals are roundoff and refinement cannot shrink them further
ROUNDOFF_FLOOR = 1e-10
LEMMA_TOL = 1e-6
LEMMA_TIMES = (0.25, 1.0, 4.0)
KERNEL_TOL = 1e-10
SEED = 20240601

FORCINGS = {
    "1": Forcing.constant(1.0),
    "t": Forcing.polynomial(0.0, 1.0),
    "exp(-t)": Forcing.exponential(-1.0),
}


@dataclass(frozen=True)
class CaseResult:
    label: str
    params: dict
    value: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "params": dict(sorted(self.params.items())),
            "value": self.value,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": dict(sorted(self.details.items())),
        }


@dataclass(frozen=True)
class SuiteResult:
    name: str
    cases: tuple[CaseResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def max_value(self) -> float:
        return max((c.value for c in self.cases), default=0.0)

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "passed": self.passed,
            "n_cases": len(self.cases),
            "n_failed": len(self.failures),
            "max_value": self.max_value,
            "cases": [c.to_dict() for c in self.cases],
        }


def _refines(coarse: float, fine: float, min_ratio: float) -> bool:
    if coarse <= ROUNDOFF_FLOOR and fine <= ROUNDOFF_FLOOR:
        return True
    return fine * min_ratio <= coarse and fine < coarse


def _refinement_case(
    label: str,
    params: dict,
    run: Callable[[int, float | None], LeibnizReport],
    min_ratio: float,
    extra: Callable[[LeibnizReport], dict] | None = None,
) -> CaseResult:
    """Residual at ``RESOLUTION`` on ``[10 h, T]``, then a doubling on a fixed window.

    The window starts at ``10 h`` of the coarse grid for both resolutions, so
    the comparison covers the same physical interval.
    """
    report = run(RESOLUTION, None)
    window = report.t_min
    fine = run(2 * RESOLUTION, window)
    coarse_value = run(RESOLUTION, window).max_residual
    details = {
        "window_start": window,
        "residual_window_N": coarse_value,
        "residual_window_2N": fine.max_residual,
        "boundary_terms": {str(k): v for k, v in sorted(report.boundary_terms.items())},
    }
    passed = report.max_residual <= RESIDUAL_TOL and _refines(
        coarse_value, fine.max_residual, min_ratio
    )
    if extra is not None:
        more = extra(report)
        details.update(more)
        passed = passed and all(v <= RESIDUAL_TOL for v in more.values())
    return CaseResult(label, params, report.max_residual, RESIDUAL_TOL, passed, details)


def _green_problem(alpha: float, beta: float, g: Forcing, N: int) -> ConvolutionProblem:
    kernel = green_kernel_of(alpha, beta, GREEN_LAM, GREEN_MU)
    return ConvolutionProblem(kernel, g, HORIZON, N)


def _green_cases(check, orders_for: Callable[[float], list[float]], min_ratio: float, extra=None):
    cases = []
    for alpha, beta in GREEN_ORDERS:
        for name, g in FORCINGS.items():
            for order in orders_for(alpha):
                params = {
                    "kernel_alpha": alpha,
                    "kernel_beta": beta,
                    "lambda": GREEN_LAM,
                    "mu": GREEN_MU,
                    "g": g.to_text(),
                    "order": order,
                    "T": HORIZON,
                    "N": RESOLUTION,
                }

                def run(N, t_min, alpha=alpha, beta=beta, g=g, order=order):
                    return check(order, _green_problem(alpha, beta, g, N), t_min)

                label = f"green({alpha},{beta}) g={name} order={order}"
                cases.append(_refinement_case(label, params, run, min_ratio, extra))
    return cases


def classical_leibniz_suite() -> SuiteResult:
    def orders(alpha):
        # the second derivative of the kernel has a finite limit at 0 only when alpha = 2
        return [1, 2] if alpha == 2 else [1]

    return SuiteResult(
        "classical-leibniz", tuple(_green_cases(classical_leibniz_check, orders, 2.0))
    )


def rl_leibniz_suite() -> SuiteResult:
    cases = _green_cases(
        lambda a, p, t: rl_leibniz_check(FracOrder(a), p, t), lambda a: [a], 2.0
    )
    return SuiteResult("rl-leibniz", tuple(cases))


def caputo_leibniz_suite() -> SuiteResult:
    cases = _green_cases(
        lambda a, p, t: caputo_leibniz_check(FracOrder(a), p, t), lambda a: [a], 2.0
    )
    return SuiteResult("caputo-leibniz", tuple(cases))


def coincidence_suite() -> SuiteResult:
    def extra(report: LeibnizReport) -> dict:
        return {"caputo_minus_rl": report.diagnostics["caputo_minus_rl"]}

    cases = []
    alpha, beta = GREEN_ORDERS[0]
    for name, g in FORCINGS.items():
        for order in (0.3, 0.7, 1.0):
            params = {
                "kernel_alpha": alpha,
                "kernel_beta": beta,
                "lambda": GREEN_LAM,
                "mu": GREEN_MU,
                "g": g.to_text(),
                "order": order,
                "T": HORIZON,
                "N": RESOLUTION,
            }

            def run(N, t_min, g=g, order=order):
                p = _green_problem(alpha, beta, g, N)
                return caputo_rl_coincidence_check(FracOrder(order), p, t_min)

            label = f"green({alpha},{beta}) g={name} order={order}"
            cases.append(_refinement_case(label, params, run, 1.0, extra))
    return SuiteResult("coincidence", tuple(cases))


RELATION_FUNCTIONS = {"1": (1.0,), "t": (0.0, 1.0), "t^2": (0.0, 0.0, 1.0)}
RELATION_HORIZON = 1.0


def _relation_grid(coefs: tuple[float, ...], N: int) -> GridFunction:
    return GridFunction.sample(Forcing.polynomial(*coefs), 0.0, RELATION_HORIZON, N)


def relation_suite() -> SuiteResult:
    """Grid-function relation between RL and Caputo derivatives, then the
    convolution form on the Green kernels of order in (1, 2)."""
    cases = []
    for name, coefs in RELATION_FUNCTIONS.items():
        for alpha in (0.5, 1.5):
            order = FracOrder(alpha)
            window = BOUNDARY_LAYER * RELATION_HORIZON / RESOLUTION
            value = rl_caputo_relation_check(_relation_grid(coefs, RESOLUTION), order)
            coarse = rl_caputo_relation_check(_relation_grid(coefs, RESOLUTION), order, window)
            fine = rl_caputo_relation_check(_relation_grid(coefs, 2 * RESOLUTION), order, window)
            passed = value <= RESIDUAL_TOL and _refines(coarse, fine, 1.0)
            params = {"f": name, "order": alpha, "T": RELATION_HORIZON, "N": RESOLUTION}
            details = {
                "window_start": window,
                "residual_window_N": coarse,
                "residual_window_2N": fine,
            }
            cases.append(
                CaseResult(f"f={name} order={alpha}", params, value, RESIDUAL_TOL, passed, details)
            )
    theorem = _green_cases(
        lambda a, p, t: rl_caputo_relation_theorem_check(FracOrder(a), p, t),
        lambda a: [a] if 1 < a < 2 else [],
        1.0,
    )
    return SuiteResult("relation", tuple(cases + theorem))


def lemma1_cases(count: int = 20, seed: int = SEED) -> list[TransferSpec]:
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(count):
        alpha = float(rng.uniform(0.3, 2.5))
        beta = float(rng.uniform(0.05, alpha - 0.25))
        lam = float(rng.uniform(-2.0, 2.0))
        power = int(rng.integers(0, 3))
        specs.append(TransferSpec.binomial(alpha, beta, lam, power))
    return specs


def lemma2_cases(count: int = 20, seed: int = SEED + 1) -> list[TransferSpec]:
    rng = np.random.default_rng(seed)
    specs = []
    for _ in range(count):
        alpha = float(rng.uniform(0.5, 2.5))
        beta = float(rng.uniform(0.05, alpha - 0.25))
        gamma_exp = float(rng.uniform(-0.5, alpha - 0.1))
        lam = float(rng.uniform(-2.0, 2.0))
        mu = float(rng.uniform(-2.0, 2.0))
        specs.append(TransferSpec.two_term(alpha, beta, gamma_exp, lam, mu))
    return specs


def _lemma_suite(name: str, specs: list[TransferSpec]) -> SuiteResult:
    cases = []
    for i, spec in enumerate(specs):
        errors = {}
        for t in LEMMA_TIMES:
            series = series_inverse(spec, t)
            contour = invert(spec, None, t)
            errors[f"t={t}"] = abs(contour - series) / abs(series)
        value = max(errors.values())
        params = {
            "alpha": spec.alpha,
            "beta": spec.beta,
            "gamma_exp": spec.gamma_exp,
            "lambda": spec.lam,
            "mu": spec.mu,
            "power": spec.power,
        }
        cases.append(CaseResult(f"set {i}", params, value, LEMMA_TOL, value <= LEMMA_TOL, errors))
    return SuiteResult(name, tuple(cases))


def lemma1_suite() -> SuiteResult:
    return _lemma_suite("lemma1", lemma1_cases())


def lemma2_suite() -> SuiteResult:
    return _lemma_suite("lemma2", lemma2_cases())


def kernel_equivalence_cases(count: int = 20, seed: int = SEED + 2) -> list[tuple[float, ...]]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        alpha = float(rng.uniform(1.05, 2.0))
        beta = float(rng.uniform(0.1, min(1.0, alpha - 0.25)))
        out.append((alpha, beta, float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2))))
    return out


def kernel_equivalence_suite() -> SuiteResult:
    taus = np.geomspace(0.01, 5.0, 10)
    cases = []
    for i, (alpha, beta, lam, mu) in enumerate(kernel_equivalence_cases()):
        direct = green_kernel(alpha, beta, lam, mu, taus)
        worst = 0.0
        for tau, value in zip(taus, direct):
            scale = tau ** (alpha - 1)
            pod = scale * h_podlubny(alpha, beta, lam, mu, float(tau))
            fox = scale * h_foxwright(alpha, beta, lam, mu, float(tau))
            spread = max(abs(value - pod), abs(value - fox), abs(pod - fox))
            worst = max(worst, spread / max(1.0, abs(value)))
        params = {"alpha": alpha, "beta": beta, "lambda": lam, "mu": mu}
        cases.append(CaseResult(f"set {i}", params, worst, KERNEL_TOL, worst <= KERNEL_TOL))
    return SuiteResult("kernel-equivalence", tuple(cases))


SUITES: dict[str, Callable[[], SuiteResult]] = {
    "classical-leibniz": classical_leibniz_suite,
    "rl-leibniz": rl_leibniz_suite,
    "caputo-leibniz": caputo_leibniz_suite,
    "coincidence": coincidence_suite,
    "relation": relation_suite,
    "lemma1": lemma1_suite,
    "lemma2": lemma2_suite,
    "kernel-equivalence": kernel_equivalence_suite,
}


def run_suite(name: str) -> SuiteResult:
    try:
        suite = SUITES[name]
    except KeyError:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return suite()
