"""Explicit one-step discretisations of dX = m dt + s dW + c dJ.

All steppers accept scalars or numpy arrays (one entry per path) and return
the unclamped next state; projecting back onto the process domain is the
caller's job. The RK support value is clamped before ``s`` is evaluated on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .errors import NumericalBlowupError
from .models import CoefficientSet

ArrayLike = Union[float, np.ndarray]


class Scheme(str, Enum):
    EULER = "Euler"
    MILSTEIN = "Milstein"
    RUNGE_KUTTA = "RungeKutta"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if key in (member.value.lower(), member.name.lower().replace("_", "")):
                return member
        if key in ("rk", "eulermaruyama"):
            return cls.RUNGE_KUTTA if key == "rk" else cls.EULER
        raise ValueError(f"unknown scheme {value!r}; valid: Euler, Milstein, RungeKutta")


@dataclass(frozen=True)
class StepInput:
    x: ArrayLike
    t: float
    dt: float
    z: ArrayLike
    dJ: ArrayLike = 0.0

    @property
    def dW(self) -> ArrayLike:
        return math.sqrt(self.dt) * self.z

    @classmethod
    def from_increment(cls, x, t, dt, dW, dJ=0.0):
        """Build from a Brownian increment instead of the standard normal."""
        return cls(x, t, dt, np.asarray(dW) / math.sqrt(dt), dJ)


def _checked(out, name):
    if not np.all(np.isfinite(out)):
        bad = np.flatnonzero(~np.isfinite(np.atleast_1d(out)))
        raise NumericalBlowupError(f"non-finite state in {name} step", path=int(bad[0]))
    return out


def _jump_term(c: CoefficientSet, inp: StepInput):
    if np.ndim(inp.dJ) == 0 and inp.dJ == 0.0:
        return 0.0
    return c.c(inp.x, inp.t) * inp.dJ


def euler_step(c: CoefficientSet, inp: StepInput):
    x, t = inp.x, inp.t
    out = x + c.m(x, t) * inp.dt + c.s(x, t) * inp.dW + _jump_term(c, inp)
    return _checked(out, "Euler")


def milstein_step(c: CoefficientSet, inp: StepInput):
    x, t = inp.x, inp.t
    sx = c.s(x, t)
    z = inp.z
    out = (x + c.m(x, t) * inp.dt + sx * inp.dW
           + 0.5 * sx * c.s_prime(x, t) * inp.dt * (z * z - 1.0)
           + _jump_term(c, inp))
    return _checked(out, "Milstein")


def runge_kutta_step(c: CoefficientSet, inp: StepInput):
    """Derivative-free Milstein: s' is replaced by a difference at a support point.

    With jumps the support value also carries c * dJ, and the jump enters
    the final update once more.
    """
    x, t, dt = inp.x, inp.t, inp.dt
    sqdt = math.sqrt(dt)
    drift = c.m(x, t) * dt
    sx = c.s(x, t)
    jump = _jump_term(c, inp)
    support = c.clamp(x + drift + sx * sqdt + jump)
    z = inp.z
    out = x + drift + sx * inp.dW + 0.5 * (c.s(support, t) - sx) * sqdt * (z * z - 1.0) + jump
    return _checked(out, "RungeKutta")


STEPPERS = {
    Scheme.EULER: euler_step,
    Scheme.MILSTEIN: milstein_step,
    Scheme.RUNGE_KUTTA: runge_kutta_step,
}


def stepper(scheme) -> callable:
    return STEPPERS[Scheme.parse(scheme)]
