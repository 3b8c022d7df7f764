import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma as gamma_fn

from fracrules.errors import BoundaryLimitSingular, ValidationError
from fracrules.forcing import Forcing
from fracrules.frac_operators import FracOrder, GridFunction, PowerMLKernel, kernel_limit_at_zero
from fracrules.leibniz import (
    ConvolutionProblem,
    caputo_leibniz_check,
    caputo_rl_coincidence_check,
    classical_leibniz_check,
    pascal_split,
    rl_caputo_relation_theorem_check,
    rl_leibniz_check,
)
from fracrules.special_functions import DEFAULT_CONTROL

ONE = Forcing.constant(1.0)
DECAY = Forcing.exponential(-1.0)
TOL = 5e-2


def green(alpha, beta, lam=-1.0, mu=-1.0):
    return PowerMLKernel(1.0, alpha, alpha - beta, alpha, lam, mu)


def problem(f, g=ONE, N=512, T=5.0):
    return ConvolutionProblem(f, g, T, N)


# --- problem validation ---


def test_convolution_problem_validation():
    with pytest.raises(ValidationError):
        problem(green(1.5, 0.5), N=8)
    with pytest.raises(ValidationError):
        problem(green(1.5, 0.5), T=0.0)
    with pytest.raises(ValidationError):
        problem(green(1.5, 0.5), g=3.0)
    with pytest.raises(ValidationError):
        problem(green(1.5, 0.5), g=GridFunction(0.0, 0.1, np.ones(10)))


# --- classical rule ---


def test_classical_rule_linear_kernel():
    r = classical_leibniz_check(1, problem(PowerMLKernel.power(2.0), N=256))
    assert r.boundary_terms == {1: 0.0}
    assert r.max_residual <= 1e-12
    mask = r.times >= r.t_min
    assert np.allclose(r.lhs[mask], r.times[mask], rtol=0, atol=1e-12)


def test_classical_rule_oscillator_kernel():
    r = classical_leibniz_check(2, problem(PowerMLKernel(1, 2, 1, 2, -2, -1)))
    assert r.boundary_terms == {1: 1.0, 2: 0.0}
    assert r.max_residual <= TOL


def test_classical_rule_unit_kernel_returns_forcing():
    r = classical_leibniz_check(1, problem(PowerMLKernel.power(1.0), g=DECAY, N=256))
    assert r.boundary_terms == {1: 1.0}
    assert np.array_equal(r.rhs, np.exp(-r.times))
    assert r.max_residual <= TOL


def test_classical_rule_rejects_singular_limits():
    with pytest.raises(BoundaryLimitSingular):
        classical_leibniz_check(2, problem(green(1.5, 0.5)))
    with pytest.raises(ValidationError):
        classical_leibniz_check(0, problem(green(1.5, 0.5)))


# --- Riemann-Liouville rule ---


def test_rl_rule_green_kernel_boundary_terms():
    r = rl_leibniz_check(FracOrder(1.5), problem(green(1.5, 0.5)))
    assert r.boundary_terms == {1: 1.0, 2: 0.0}
    assert r.max_residual <= TOL


def test_rl_rule_power_kernel_inverts_the_integral():
    # D^a I^a 1 = 1
    r = rl_leibniz_check(FracOrder(1.3), problem(PowerMLKernel.power(1.3)))
    assert r.boundary_terms[1] == 1.0
    mask = r.times >= r.t_min
    assert np.max(np.abs(r.lhs[mask] - 1.0)) <= 1e-3
    assert np.array_equal(r.rhs, np.ones_like(r.rhs))


@pytest.mark.parametrize("n", [1, 2])
def test_rl_rule_at_integer_order_matches_classical(n):
    kernel = PowerMLKernel(1, 2, 1, 2, -2, -1)
    p = problem(kernel, g=DECAY)
    rl = rl_leibniz_check(FracOrder(float(n)), p)
    classical = classical_leibniz_check(n, p)
    assert np.array_equal(rl.lhs, classical.lhs)
    mask = rl.times >= rl.t_min
    assert np.max(np.abs(rl.rhs - classical.rhs)[mask]) <= rl.max_residual + classical.max_residual + 1e-12


@pytest.mark.parametrize("alpha,beta", [(1.5, 0.5), (1.2, 0.8), (2.0, 1.0), (1.7, 0.3)])
def test_boundary_term_ladder_for_green_kernels(alpha, beta):
    k = green(alpha, beta)
    # D^(alpha - l) of a gamma = alpha kernel is a gamma = l kernel
    assert kernel_limit_at_zero(PowerMLKernel(1, k.alpha, k.beta, 1.0, k.lam, k.mu)) == 1.0
    r = rl_leibniz_check(FracOrder(alpha), problem(k, N=256))
    assert r.boundary_terms[1] == 1.0
    assert all(r.boundary_terms[l] == 0.0 for l in range(2, FracOrder(alpha).n + 1))


# --- Caputo rule ---


def test_caputo_rule_split_kernel_has_no_bracket():
    r = caputo_leibniz_check(FracOrder(1.5), problem(PowerMLKernel(1, 1.5, 1.0, 3.0, -1, -1)))
    assert r.boundary_terms == {1: 0.0, 2: 0.0}
    assert r.max_residual <= TOL


def test_caputo_rule_integer_order_matches_classical():
    p = problem(PowerMLKernel(1, 2, 1, 2, -2, -1), g=DECAY)
    caputo = caputo_leibniz_check(FracOrder(2.0), p)
    classical = classical_leibniz_check(2, p)
    assert caputo.max_residual <= TOL
    mask = caputo.times >= caputo.t_min
    assert np.max(np.abs(caputo.lhs - classical.lhs)[mask]) <= 1e-3


def test_caputo_rule_linear_kernel():
    r = caputo_leibniz_check(FracOrder(1.5), problem(PowerMLKernel.power(2.0)))
    mask = r.times >= r.t_min
    exact = r.times[mask] ** 0.5 / gamma_fn(1.5)
    assert np.max(np.abs(r.lhs[mask] - exact)) <= 1e-10
    assert np.max(np.abs(r.rhs[mask] - exact)) <= 1e-10


def test_caputo_rule_needs_order_above_one():
    with pytest.raises(ValidationError):
        caputo_leibniz_check(FracOrder(0.7), problem(green(1.5, 0.5)))


# --- coincidence for orders in (0, 1] ---


def test_coincidence_green_kernel():
    r = caputo_rl_coincidence_check(FracOrder(0.5), problem(green(1.5, 0.5)))
    assert r.boundary_terms == {1: 0.0}
    assert r.max_residual <= TOL
    assert r.diagnostics["caputo_minus_rl"] <= TOL


def test_coincidence_unit_kernel():
    r = caputo_rl_coincidence_check(FracOrder(0.5), problem(PowerMLKernel.power(1.0), g=DECAY))
    assert r.max_residual <= TOL
    assert r.diagnostics["caputo_minus_rl"] <= TOL


def test_coincidence_power_kernel():
    r = caputo_rl_coincidence_check(FracOrder(0.7), problem(PowerMLKernel.power(1.2)))
    assert r.max_residual <= TOL
    assert r.diagnostics["caputo_minus_rl"] <= TOL


def test_coincidence_rejects_large_order():
    with pytest.raises(ValidationError):
        caputo_rl_coincidence_check(FracOrder(1.5), problem(green(1.5, 0.5)))


# --- relation between the two rules ---


def test_relation_green_kernel_has_no_correction():
    r = rl_caputo_relation_theorem_check(FracOrder(1.5), problem(green(1.5, 0.5)))
    assert r.boundary_terms == {1: 0.0}
    assert np.all(r.rhs == 0.0)
    assert r.max_residual <= TOL


def test_relation_unit_kernel():
    r = rl_caputo_relation_theorem_check(FracOrder(1.5), problem(PowerMLKernel.power(1.0)))
    assert r.boundary_terms == {1: 1.0}
    t = r.times[1:]
    assert np.allclose(r.rhs[1:], t**-0.5 / gamma_fn(0.5), rtol=1e-14)
    assert r.max_residual <= TOL


def test_relation_integer_order_correction_vanishes():
    r = rl_caputo_relation_theorem_check(FracOrder(2.0), problem(PowerMLKernel.power(1.0)))
    assert np.all(r.rhs == 0.0)
    assert r.max_residual <= TOL


# --- Pascal splitting ---


def test_pascal_split_examples():
    zero = PowerMLKernel(1, 1.5, 1.0, 0.0, -1, 2)
    pieces = pascal_split(zero)
    assert [(p.coef, p.gamma) for p in pieces] == [(-1.0, 1.5), (2.0, 1.0)]
    pure = PowerMLKernel.power(1.7, 3.0)
    assert pascal_split(pure) == [pure]


@settings(max_examples=40)
@given(
    st.floats(0.5, 2.5),
    st.floats(0.5, 2.5),
    st.floats(0.1, 3.0),
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.floats(0.01, 5.0),
)
def test_pascal_split_is_an_exact_identity(alpha, beta, gamma, lam, mu, tau):
    k = PowerMLKernel(1.0, alpha, beta, gamma, lam, mu)
    tau = np.array([tau])
    whole = float(k(tau, DEFAULT_CONTROL)[0])
    parts = sum(float(p(tau, DEFAULT_CONTROL)[0]) for p in pascal_split(k))
    assert abs(whole - parts) <= 1e-12 * max(1.0, abs(whole))


# --- convergence and reports ---


def test_residual_decreases_under_refinement():
    k = green(1.5, 0.5)
    coarse = rl_leibniz_check(FracOrder(1.5), problem(k, g=DECAY, N=256), t_min=0.5)
    fine = rl_leibniz_check(FracOrder(1.5), problem(k, g=DECAY, N=512), t_min=0.5)
    assert fine.max_residual < coarse.max_residual / 2


def test_sampled_and_callable_forcing_agree():
    k = green(1.5, 0.5)
    p = problem(k, g=DECAY, N=256)
    sampled = problem(k, g=p.g_grid(), N=256)
    a = rl_leibniz_check(FracOrder(1.5), p)
    b = rl_leibniz_check(FracOrder(1.5), sampled)
    assert np.array_equal(a.lhs, b.lhs)
    assert math.isclose(a.max_residual, b.max_residual, rel_tol=1e-2)


def test_report_serialises():
    r = rl_leibniz_check(FracOrder(1.5), problem(green(1.5, 0.5), N=64))
    doc = json.loads(json.dumps(r.to_dict(include_samples=True)))
    assert doc["check"] == "rl-leibniz"
    assert doc["boundary_terms"] == {"1": 1.0, "2": 0.0}
    assert len(doc["lhs"]) == len(doc["rhs"]) == len(doc["t"]) == 65
    assert doc["max_residual"] >= doc["rms_residual"] >= 0
