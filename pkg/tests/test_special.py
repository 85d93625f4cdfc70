import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from quanto_mc.special import lower_gamma, upper_gamma, upper_gamma_scaled


def quad_upper_gamma(a, x):
    mpmath.mp.dps = 30
    return float(mpmath.quad(lambda t: t ** (a - 1) * mpmath.exp(-t), [x, x + 1, x + 10, mpmath.inf]))


@pytest.mark.parametrize("a,x", [(1.5, 0.1), (1.5, 2.5), (2.0, 0.0), (1.25, 7.0), (3.0, 40.0)])
def test_upper_gamma_matches_quadrature(a, x):
    got = float(upper_gamma(a, np.array([x]))[0])
    assert got == pytest.approx(quad_upper_gamma(a, x), rel=1e-12)


def test_integer_shape_closed_form():
    # Gamma(2, x) = (1 + x) e^-x
    x = np.linspace(0.0, 30.0, 61)
    assert np.allclose(upper_gamma(2.0, x), (1 + x) * np.exp(-x), rtol=1e-13, atol=0)


def test_half_integer_shape_uses_erfc():
    # Gamma(1/2, x) = sqrt(pi) erfc(sqrt(x))
    x = np.array([0.01, 0.3, 1.0, 2.0, 9.0])
    ref = np.array([math.sqrt(math.pi) * math.erfc(math.sqrt(v)) for v in x])
    assert np.allclose(upper_gamma(0.5, x), ref, rtol=1e-12, atol=0)


def test_scaled_form_survives_large_x():
    x = np.array([800.0])
    assert np.isfinite(upper_gamma_scaled(1.5, x)).all()
    assert upper_gamma(1.5, x)[0] == 0.0


@given(a=st.floats(1.05, 4.0), x=st.floats(1e-6, 60.0))
def test_lower_plus_upper_is_complete_gamma(a, x):
    arr = np.array([x])
    total = lower_gamma(a, arr)[0] + upper_gamma(a, arr)[0]
    assert total == pytest.approx(math.gamma(a), rel=1e-12)


@given(a=st.floats(1.05, 4.0), x=st.floats(0.0, 50.0), dx=st.floats(1e-3, 5.0))
def test_upper_gamma_is_decreasing(a, x, dx):
    vals = upper_gamma(a, np.array([x, x + dx]))
    assert vals[1] <= vals[0]
