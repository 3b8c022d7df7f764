import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracrules.errors import DivergentParameters, NonConvergence, SingularAtZero, ValidationError
from fracrules.special_functions import (
    BivariateMLParams,
    FoxWrightParams,
    MLParams,
    SeriesControl,
    bivariate_ml,
    bivariate_ml_univariate,
    fox_wright,
    h_foxwright,
    h_podlubny,
    ml2,
    ml2_deriv,
    ml3,
    recip_gamma,
)

from oracles import mp_bivariate, mp_fox_wright, mp_ml_deriv, mp_prabhakar


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# --- recip_gamma ---


def test_recip_gamma_examples():
    assert recip_gamma(1.0) == 1.0
    assert recip_gamma(0.0) == 0.0
    assert rel_err(recip_gamma(0.5), float(1 / mpmath.sqrt(mpmath.pi))) <= 1e-13


@pytest.mark.parametrize("x", [-1.0, -2.0, -7.0, -50.0])
def test_recip_gamma_is_exactly_zero_at_poles(x):
    assert recip_gamma(x) == 0.0


@given(st.floats(min_value=-170, max_value=170, allow_nan=False))
def test_recip_gamma_matches_mpmath(x):
    ref = float(mpmath.rgamma(x))
    assert abs(recip_gamma(x) - ref) <= 1e-13 * abs(ref) + 1e-300


@given(st.floats(min_value=-30, max_value=30, allow_nan=False))
def test_recip_gamma_recurrence(x):
    if x == 0 or (x < 0 and x == int(x)):
        return
    lhs = recip_gamma(x + 1)
    rhs = recip_gamma(x) / x
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


# --- two- and three-parameter functions ---


def test_ml2_examples():
    assert rel_err(ml2(MLParams(1, 1), 1.0), math.e) <= 1e-14
    assert abs(ml2(MLParams(2, 1), -(math.pi / 2) ** 2)) <= 1e-14
    assert ml2(MLParams(0.5, 1), 0.0) == 1.0


@settings(max_examples=60)
@given(st.floats(min_value=-10, max_value=10))
def test_ml2_exp_and_cos_identities(t):
    assert abs(ml2(MLParams(1, 1), t) - math.exp(t)) <= 1e-12 * math.exp(abs(t))
    x = abs(t)
    assert abs(ml2(MLParams(2, 1), -x * x) - math.cos(x)) <= 1e-12


@settings(max_examples=40)
@given(
    st.floats(min_value=0.8, max_value=3.0),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=-50.0, max_value=50.0),
)
def test_ml2_matches_high_precision_sum(alpha, beta, t):
    ref = mp_prabhakar(alpha, beta, 1.0, t)
    assert abs(ml2(MLParams(alpha, beta), t) - ref) <= 1e-12 * (1 + abs(ref))


@settings(max_examples=30)
@given(
    st.floats(min_value=0.3, max_value=0.8),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=-5.0, max_value=5.0),
)
def test_ml2_small_alpha_matches_high_precision_sum(alpha, beta, t):
    ref = mp_prabhakar(alpha, beta, 1.0, t)
    assert abs(ml2(MLParams(alpha, beta), t) - ref) <= 1e-12 * (1 + abs(ref))


def test_ml3_examples():
    p = MLParams(1.3, 0.7, 1.0)
    for t in (-3.0, 0.5, 4.0):
        assert ml3(p, t) == pytest.approx(ml2(p, t), rel=1e-13, abs=1e-14)
    assert rel_err(ml3(MLParams(1, 1, 1), 1.0), math.e) <= 1e-14
    assert rel_err(ml3(MLParams(0.7, 1.3, 2.0), 0.0), 1 / math.gamma(1.3)) <= 1e-15


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.5, max_value=2.5),
    st.floats(min_value=0.1, max_value=2.5),
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=-8.0, max_value=8.0),
)
def test_ml3_matches_high_precision_sum(alpha, beta, gamma_p, t):
    ref = mp_prabhakar(alpha, beta, gamma_p, t)
    assert abs(ml3(MLParams(alpha, beta, gamma_p), t) - ref) <= 1e-12 * (1 + abs(ref))


def test_ml2_deriv_examples():
    p = MLParams(0.8, 1.4)
    assert ml2_deriv(0, p, 2.5) == pytest.approx(ml2(p, 2.5), rel=1e-14)
    assert rel_err(ml2_deriv(1, MLParams(1, 1), 1.0), math.e) <= 1e-14
    assert ml2_deriv(2, MLParams(1, 1), 0.0) == pytest.approx(1.0, rel=1e-15)
    with pytest.raises(ValidationError):
        ml2_deriv(-1, p, 1.0)


@settings(max_examples=30, deadline=None)
@given(
    st.integers(min_value=0, max_value=5),
    st.floats(min_value=0.4, max_value=2.0),
    st.floats(min_value=0.5, max_value=2.5),
    st.floats(min_value=-6.0, max_value=6.0),
)
def test_ml2_deriv_matches_high_precision_sum(l, alpha, beta, t):
    ref = mp_ml_deriv(l, alpha, beta, t)
    assert abs(ml2_deriv(l, MLParams(alpha, beta), t) - ref) <= 1e-12 * (1 + abs(ref))


def test_ml_params_validation():
    with pytest.raises(ValidationError, match="alpha"):
        MLParams(0.0, 1.0)
    with pytest.raises(ValidationError):
        MLParams(1.0, float("nan"))


def test_series_control_limits_terms():
    with pytest.raises(NonConvergence):
        ml2(MLParams(1, 1), 30.0, SeriesControl(max_terms=10))
    with pytest.raises(ValidationError):
        SeriesControl(rel_tol=0.0)
    with pytest.raises(ValidationError):
        SeriesControl(max_terms=0)


def test_series_control_from_env():
    assert SeriesControl.from_env({}).rel_tol == 1e-14
    assert SeriesControl.from_env({"FRACRULES_RELTOL": "1e-10"}).rel_tol == 1e-10
    with pytest.raises(ValidationError):
        SeriesControl.from_env({"FRACRULES_RELTOL": "tight"})


def test_cancellation_triggers_extended_precision():
    # E_1(-30) = exp(-30): double-precision summation would lose every digit
    assert rel_err(ml2(MLParams(1, 1), -30.0), math.exp(-30.0)) <= 1e-12


# --- bivariate ---


def test_bivariate_examples():
    p = BivariateMLParams(1.7, 0.6, 1.3)
    assert bivariate_ml(p, 2.2, 0.0) == pytest.approx(ml2(MLParams(1.7, 1.3), 2.2), rel=1e-13)
    assert bivariate_ml(BivariateMLParams(0.9, 0.4, 1.0), 0.0, 0.0) == 1.0
    assert bivariate_ml(BivariateMLParams(2, 1, 2), -1.0, 0.0) == pytest.approx(
        math.sin(1.0), abs=1e-15
    )


@settings(max_examples=30, deadline=None)
@given(
    st.floats(min_value=0.3, max_value=2.5),
    st.floats(min_value=0.3, max_value=2.5),
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
    st.floats(min_value=-3.0, max_value=3.0),
)
def test_bivariate_symmetry(alpha, beta, gamma, u, v):
    a = bivariate_ml(BivariateMLParams(alpha, beta, gamma), u, v)
    b = bivariate_ml(BivariateMLParams(beta, alpha, gamma), v, u)
    assert abs(a - b) <= 1e-12 * (1 + abs(a))


@settings(max_examples=40, deadline=None)
@given(
    st.floats(min_value=0.2, max_value=3.0),
    st.floats(min_value=0.1, max_value=3.0),
    st.floats(min_value=-10.0, max_value=10.0),
)
def test_bivariate_collapse(alpha, gamma, u):
    try:
        ref = ml2(MLParams(alpha, gamma), u)
    except NonConvergence:
        return
    value = bivariate_ml(BivariateMLParams(alpha, 1.0, gamma), u, 0.0)
    assert abs(value - ref) <= 1e-12 * (1 + abs(ref))


@pytest.mark.parametrize(
    "alpha,beta,gamma,u,v",
    [(1.5, 1.0, 1.5, -2.0, -2.0), (0.8, 0.3, 1.1, 1.5, -0.7), (2.0, 0.5, 0.4, -4.0, 1.2)],
)
def test_bivariate_matches_high_precision_sum(alpha, beta, gamma, u, v):
    ref = mp_bivariate(alpha, beta, gamma, u, v)
    assert abs(bivariate_ml(BivariateMLParams(alpha, beta, gamma), u, v) - ref) <= 1e-12 * (
        1 + abs(ref)
    )


def test_bivariate_general_delta_matches_oracle():
    ref = mp_bivariate(1.2, 0.7, 1.1, -0.8, 0.6, delta=2.5)
    assert bivariate_ml(BivariateMLParams(1.2, 0.7, 1.1, 2.5), -0.8, 0.6) == pytest.approx(
        ref, rel=1e-12
    )


def test_univariate_examples():
    sine = BivariateMLParams(2, 1, 2)
    assert abs(bivariate_ml_univariate(sine, -1.0, 0.0, math.pi)) <= 1e-10
    assert bivariate_ml_univariate(BivariateMLParams(1.5, 0.5, 1.0), 2.0, 3.0, 0.0) == 1.0
    assert bivariate_ml_univariate(BivariateMLParams(1.5, 0.5, 2.0), 2.0, 3.0, 0.0) == 0.0
    t = 1.7
    pure = bivariate_ml_univariate(BivariateMLParams(1.4, 0.6, 1.4), 0.0, 0.0, t)
    assert pure == pytest.approx(t**0.4 / math.gamma(1.4), rel=1e-14)
    with pytest.raises(SingularAtZero):
        bivariate_ml_univariate(BivariateMLParams(1.5, 0.5, 0.5), 1.0, 1.0, 0.0)
    with pytest.raises(ValidationError):
        bivariate_ml_univariate(sine, -1.0, 0.0, -1.0)


def test_bivariate_params_validation():
    with pytest.raises(ValidationError):
        BivariateMLParams(1.0, 0.0, 1.0)


# --- Fox-Wright ---


def test_fox_wright_examples():
    assert rel_err(fox_wright(FoxWrightParams(), 1.0), math.e) <= 1e-14
    alpha, beta = 1.3, 0.8
    fw = FoxWrightParams(upper=((1.0, 1.0),), lower=((beta, alpha),))
    for t in (-2.0, 0.7, 3.0):
        assert fw_close(fox_wright(fw, t), ml2(MLParams(alpha, beta), t))
    params = FoxWrightParams(upper=((2.5, 0.4), (1.2, 0.3)), lower=((0.7, 1.5),))
    expected = math.gamma(2.5) * math.gamma(1.2) / math.gamma(0.7)
    assert fox_wright(params, 0.0) == pytest.approx(expected, rel=1e-14)


def fw_close(a, b):
    return abs(a - b) <= 1e-12 * (1 + abs(b))


def test_fox_wright_divergence_condition():
    with pytest.raises(DivergentParameters):
        fox_wright(FoxWrightParams(upper=((1.0, 2.0),), lower=((1.0, 0.5),)), 0.5)


def test_fox_wright_matches_high_precision_sum():
    upper, lower = ((1.5, 0.5),), ((0.8, 1.2), (2.0, 0.6))
    ref = mp_fox_wright(upper, lower, -2.3)
    assert fox_wright(FoxWrightParams(upper, lower), -2.3) == pytest.approx(ref, rel=1e-13)


# --- H-forms ---


def test_h_forms_examples():
    a, b, mu, t = 1.6, 0.7, -0.8, 1.3
    reduced = ml2(MLParams(a - b, a), mu * t ** (a - b))
    assert h_podlubny(a, b, 0.0, mu, t) == pytest.approx(reduced, rel=1e-14)
    assert h_foxwright(a, b, 0.0, mu, t) == pytest.approx(reduced, rel=1e-13)
    assert h_podlubny(a, b, 0.0, 0.0, 1.0) == pytest.approx(1 / math.gamma(a), rel=1e-15)
    assert h_foxwright(a, b, 0.0, 0.0, 1.0) == pytest.approx(1 / math.gamma(a), rel=1e-15)


def test_h_forms_match_bivariate_kernel():
    kernel = bivariate_ml_univariate(BivariateMLParams(1.5, 1.0, 1.5), -1.0, -1.0, 1.0)
    assert h_podlubny(1.5, 0.5, -1.0, -1.0, 1.0) == pytest.approx(kernel, rel=1e-13)
    assert abs(h_foxwright(1.5, 0.5, -1.0, -1.0, 0.5) - h_podlubny(1.5, 0.5, -1.0, -1.0, 0.5)) <= 1e-10


def test_h_forms_survive_outer_cancellation():
    # lambda t^alpha = -31: the outer sum cancels by about seven digits
    a, b, lam, mu, t = 1.7274776427309337, 1.357728787899976, -1.947589053152576, 1.71875, 5.0
    ref = bivariate_ml_univariate(BivariateMLParams(a, a - b, a), lam, mu, t) / t ** (a - 1)
    assert h_podlubny(a, b, lam, mu, t) == pytest.approx(ref, rel=1e-11)
    assert h_foxwright(a, b, lam, mu, t) == pytest.approx(ref, rel=1e-11)


def test_h_forms_validate():
    with pytest.raises(ValidationError):
        h_podlubny(0.5, 0.7, 1.0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        h_foxwright(1.5, 0.5, 1.0, 1.0, 0.0)


def test_kernel_values_are_vectorised():
    from fracrules.special_functions import bivariate_kernel_values

    p = BivariateMLParams(1.5, 1.0, 1.5)
    tau = np.array([0.0, 0.3, 1.1, 2.0])
    values = bivariate_kernel_values(p, -1.0, 0.5, tau)
    singles = [bivariate_ml(p, -(x**1.5), 0.5 * x) for x in tau]
    np.testing.assert_allclose(values, singles, rtol=1e-14)
