"""Incomplete gamma functions.

Lower series for ``x < a + 1`` and a modified-Lentz continued fraction for
``x >= a + 1`` (the classic split). Both branches work elementwise on numpy
arrays for a scalar shape ``a`` and target a relative error of about 1e-13.
"""

import math

import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 1000


def _lower_series_scaled(a, x):
    """Return sum_n x^n / (a (a+1) ... (a+n)), so gamma(a, x) = x^a e^-x * sum."""
    term = np.full_like(x, 1.0 / a)
    total = term.copy()
    ap = a
    active = np.ones(x.shape, dtype=bool)
    for _ in range(_MAX_ITER):
        ap += 1.0
        term = np.where(active, term * x / ap, term)
        total = np.where(active, total + term, total)
        active &= np.abs(term) > np.abs(total) * _EPS
        if not active.any():
            break
    return total


def _upper_cf_scaled(a, x):
    """Continued fraction for Gamma(a, x) * e^x * x^-a (x >= a + 1)."""
    b = x + 1.0 - a
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b = b + 2.0
        d_new = an * d + b
        d_new = np.where(np.abs(d_new) < _TINY, _TINY, d_new)
        c_new = b + an / c
        c_new = np.where(np.abs(c_new) < _TINY, _TINY, c_new)
        d_new = 1.0 / d_new
        delta = d_new * c_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > _EPS
        if not active.any():
            break
    return h


def _check(a, x):
    if not a > 0:
        raise ValueError(f"shape a must be positive, got {a}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be non-negative")
    return x


def upper_gamma_scaled(a, x):
    """``Gamma(a, x) * exp(x)``; finite for large ``x`` where Gamma(a, x) underflows."""
    x = _check(a, x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    lo = x < a + 1.0
    if lo.any():
        xl = x[lo]
        low = np.exp(a * np.log(np.where(xl > 0, xl, 1.0)) - xl) * _lower_series_scaled(a, xl)
        low = np.where(xl > 0, low, 0.0)
        out[lo] = (math.gamma(a) - low) * np.exp(xl)
    hi = ~lo
    if hi.any():
        xh = x[hi]
        out[hi] = np.exp(a * np.log(xh)) * _upper_cf_scaled(a, xh)
    return out[0] if scalar else out


def upper_gamma(a, x):
    """Upper incomplete gamma ``Gamma(a, x) = int_x^inf t^(a-1) e^-t dt``."""
    x = _check(a, x)
    return upper_gamma_scaled(a, x) * np.exp(-x)


def lower_gamma(a, x):
    """Lower incomplete gamma ``gamma(a, x) = int_0^x t^(a-1) e^-t dt``."""
    x = _check(a, x)
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    lo = x < a + 1.0
    if lo.any():
        xl = x[lo]
        val = np.exp(a * np.log(np.where(xl > 0, xl, 1.0)) - xl) * _lower_series_scaled(a, xl)
        out[lo] = np.where(xl > 0, val, 0.0)
    hi = ~lo
    if hi.any():
        xh = x[hi]
        out[hi] = math.gamma(a) - np.exp(a * np.log(xh) - xh) * _upper_cf_scaled(a, xh)
    return out[0] if scalar else out
