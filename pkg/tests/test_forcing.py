import numpy as np
import pytest

from fracrules.errors import UnsupportedForcing
from fracrules.forcing import Forcing, parse_forcing


@pytest.mark.parametrize(
    "text,expected",
    [
        ("const:2.5", Forcing.constant(2.5)),
        ("poly:1,0,-3", Forcing.polynomial(1, 0, -3)),
        ("exp:-0.5", Forcing.exponential(-0.5)),
        (" EXP : 2 ", Forcing.exponential(2.0)),
    ],
)
def test_parse_forcing(text, expected):
    assert parse_forcing(text) == expected


@pytest.mark.parametrize("text", ["", "const", "const:", "const:1,2", "sin:1", "exp:a", "poly:1,,2"])
def test_parse_forcing_rejects(text):
    with pytest.raises(UnsupportedForcing):
        parse_forcing(text)


@pytest.mark.parametrize("text", ["const:1.5", "poly:1.0,-2.0,0.25", "exp:-1.0"])
def test_text_round_trip(text):
    assert parse_forcing(text).to_text() == text


def test_values_and_derivatives():
    t = np.linspace(0, 2, 5)
    p = Forcing.polynomial(1, 2, 3)
    assert np.allclose(p(t), 1 + 2 * t + 3 * t**2, rtol=1e-15)
    assert np.allclose(p.derivative(1)(t), 2 + 6 * t, rtol=1e-15)
    assert np.allclose(p.derivative(3)(t), 0.0)
    e = Forcing.exponential(-2.0)
    assert np.allclose(e.derivative(2)(t), 4 * np.exp(-2 * t), rtol=1e-15)
    assert Forcing.constant(4.0)(t).shape == t.shape


def test_laplace_transforms_and_poles():
    s = 3.0 + 0.5j
    assert Forcing.polynomial(2, 1).laplace(s) == pytest.approx(2 / s + 1 / s**2)
    assert Forcing.exponential(1.5, 2.0).laplace(s) == pytest.approx(2 / (s - 1.5))
    assert Forcing.exponential(1.5).poles == (1.5 + 0j,)
    assert Forcing.constant(1.0).poles == (0j,)


def test_zero_detection():
    assert Forcing.constant(0.0).is_zero()
    assert Forcing.exponential(1.0, 0.0).is_zero()
    assert not Forcing.polynomial(0, 1).is_zero()
