"""SDE coefficient sets for the volatility, correlation, FX and asset processes.

Every process is written in the generic jump-diffusion form

    dX = m(X, t) dt + s(X, t) dW + c(X, t) dJ

and exposed as a :class:`CoefficientSet` carrying ``m``, ``s``, the state
derivative ``s_prime`` (needed by Milstein) and the jump coefficient ``c``.
All callables are vectorised over numpy arrays and pure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import InvalidParameterError
from .special import lower_gamma, upper_gamma_scaled

EPS_STATE = 1e-12
WEIBULL_FD_STEP = 1e-6


class FellerWarning(UserWarning):
    """Square-root variance parameters violate 2*kappa*theta > sigma^2."""


class SvModel(str, Enum):
    HESTON = "Heston"
    GARCH = "Garch"
    GARCH_JUMP = "GarchJump"
    BATES = "Bates"
    THREE_HALVES = "ThreeHalves"

    def __str__(self):
        return self.value


class ScModel(str, Enum):
    WRIGHT_FISHER = "WrightFisher"
    JACOBI = "Jacobi"
    MEAN_REVERTING = "MeanReverting"
    WEIBULL = "Weibull"
    CONSTANT = "Constant"

    def __str__(self):
        return self.value


class SerModel(str, Enum):
    GBM = "Gbm"
    OU = "Ou"
    EXP_LEVY = "ExpLevy"

    def __str__(self):
        return self.value


STOCHASTIC_SC = (ScModel.WRIGHT_FISHER, ScModel.JACOBI, ScModel.MEAN_REVERTING, ScModel.WEIBULL)


def _parse_enum(enum_cls, value):
    if isinstance(value, enum_cls):
        return value
    for member in enum_cls:
        if str(value).lower() in (member.value.lower(), member.name.lower()):
            return member
    valid = ", ".join(m.value for m in enum_cls)
    raise InvalidParameterError(f"unknown {enum_cls.__name__} tag {value!r}; valid tags: {valid}")


parse_tag = _parse_enum


@dataclass(frozen=True)
class JumpParams:
    """Compound Poisson jumps with Normal(mu_j, sigma_j^2) sizes."""

    lam: float
    mu_j: float = 0.0
    sigma_j: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.lam) and self.lam >= 0):
            raise InvalidParameterError(f"jump intensity must be >= 0, got {self.lam}")
        if not (math.isfinite(self.sigma_j) and self.sigma_j >= 0):
            raise InvalidParameterError(f"jump size stdev must be >= 0, got {self.sigma_j}")
        if not math.isfinite(self.mu_j):
            raise InvalidParameterError("jump mean must be finite")


@dataclass(frozen=True)
class SvParams:
    variant: SvModel
    kappa: float = 1.0
    theta: float = 0.04
    sigma: float = 0.3
    omega32: float = 0.0
    jump: Optional[JumpParams] = None
    zeta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", _parse_enum(SvModel, self.variant))
        v = self.variant
        if v is SvModel.THREE_HALVES:
            if not self.omega32 > 0:
                raise InvalidParameterError("ThreeHalves requires omega32 > 0")
        elif not self.kappa > 0:
            raise InvalidParameterError(f"{v}: kappa must be > 0, got {self.kappa}")
        if not self.theta > 0:
            raise InvalidParameterError(f"{v}: theta must be > 0, got {self.theta}")
        if not self.sigma >= 0:
            raise InvalidParameterError(f"{v}: sigma must be >= 0, got {self.sigma}")
        if v in (SvModel.GARCH_JUMP, SvModel.BATES):
            if self.jump is None:
                raise InvalidParameterError(f"{v} requires jump parameters")
        elif self.jump is not None:
            raise InvalidParameterError(f"{v} takes no jump parameters")
        if v in (SvModel.HESTON, SvModel.BATES) and not self.feller_satisfied:
            warnings.warn(
                f"{v}: Feller condition violated (2*kappa*theta={2 * self.kappa * self.theta:.4g}"
                f" <= sigma^2={self.sigma ** 2:.4g})",
                FellerWarning,
                stacklevel=3,
            )

    @property
    def feller_satisfied(self) -> bool:
        return 2.0 * self.kappa * self.theta > self.sigma ** 2

    @property
    def has_jumps(self) -> bool:
        return self.jump is not None


@dataclass(frozen=True)
class ScParams:
    variant: ScModel
    kappa: float = 1.0
    rho_bar: float = 0.0
    sigma: float = 0.2
    h: float = 1.0
    f: float = -1.0
    alpha: float = 1.0
    lambda_w: float = 0.5
    k_w: float = 2.0
    rho_const: float = 0.0
    weibull_sqrt_diffusion: bool = False

    def __post_init__(self):
        object.__setattr__(self, "variant", _parse_enum(ScModel, self.variant))
        v = self.variant
        if v is ScModel.CONSTANT:
            if not -1.0 <= self.rho_const <= 1.0:
                raise InvalidParameterError(f"rho_const must lie in [-1, 1], got {self.rho_const}")
            return
        if v is ScModel.WEIBULL:
            for name in ("alpha", "lambda_w", "k_w"):
                if not getattr(self, name) > 0:
                    raise InvalidParameterError(f"Weibull: {name} must be > 0")
            return
        if not self.kappa > 0:
            raise InvalidParameterError(f"{v}: kappa must be > 0, got {self.kappa}")
        if not self.sigma >= 0:
            raise InvalidParameterError(f"{v}: sigma must be >= 0, got {self.sigma}")
        if not -1.0 <= self.rho_bar <= 1.0:
            raise InvalidParameterError(f"{v}: rho_bar must lie in [-1, 1], got {self.rho_bar}")
        if v is ScModel.JACOBI:
            if not -1.0 <= self.f < self.h <= 1.0:
                raise InvalidParameterError(f"Jacobi bounds need -1 <= f < h <= 1, got f={self.f}, h={self.h}")
            if not self.f < self.rho_bar < self.h:
                raise InvalidParameterError(f"Jacobi needs f < rho_bar < h, got rho_bar={self.rho_bar}")

    @property
    def mu_w(self) -> float:
        """Weibull mean lambda * Gamma(1 + 1/k)."""
        return self.lambda_w * math.gamma(1.0 + 1.0 / self.k_w)

    @property
    def domain(self) -> tuple[float, float]:
        if self.variant is ScModel.JACOBI:
            return (self.f, self.h)
        if self.variant is ScModel.WEIBULL:
            return (0.0, 1.0)
        return (-1.0, 1.0)


@dataclass(frozen=True)
class SerParams:
    variant: SerModel
    sigma_fx: float = 0.1
    theta_ou: float = 0.0
    mu_ou: float = 1.0
    jump: Optional[JumpParams] = None
    r_f: float = 0.0
    r_d: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "variant", _parse_enum(SerModel, self.variant))
        v = self.variant
        if not self.sigma_fx >= 0:
            raise InvalidParameterError(f"{v}: sigma_fx must be >= 0, got {self.sigma_fx}")
        if v is SerModel.OU:
            if not self.theta_ou >= 0:
                raise InvalidParameterError("Ou: theta_ou must be >= 0")
            if not self.mu_ou > 0:
                raise InvalidParameterError("Ou: mu_ou must be > 0")
        if v is SerModel.EXP_LEVY and self.jump is None:
            raise InvalidParameterError("ExpLevy requires jump parameters")
        if v is not SerModel.EXP_LEVY and self.jump is not None:
            raise InvalidParameterError(f"{v} takes no jump parameters")

    @property
    def has_jumps(self) -> bool:
        return self.jump is not None


Coef = Callable[[np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class CoefficientSet:
    """Drift, diffusion, diffusion derivative and jump coefficient of one SDE."""

    m: Coef
    s: Coef
    s_prime: Coef
    c: Coef
    domain: tuple[float, float] = (0.0, math.inf)
    name: str = field(default="", compare=False)

    def clamp(self, x):
        lo, hi = self.domain
        return np.clip(x, lo, hi)


def _const(value):
    def fn(x, t):
        return np.zeros_like(np.asarray(x, dtype=float)) + value
    return fn


_ZERO = _const(0.0)


def sv_coefficients(p: SvParams) -> CoefficientSet:
    kappa, theta, sigma = p.kappa, p.theta, p.sigma
    jump_c = _const(p.zeta) if p.has_jumps else _ZERO

    if p.variant in (SvModel.HESTON, SvModel.BATES):
        def m(v, t):
            return kappa * (theta - v)

        def s(v, t):
            return sigma * np.sqrt(np.maximum(v, 0.0))

        def s_prime(v, t):
            return sigma / (2.0 * np.sqrt(np.maximum(v, EPS_STATE)))

    elif p.variant in (SvModel.GARCH, SvModel.GARCH_JUMP):
        def m(v, t):
            return kappa * (theta - v)

        def s(v, t):
            return sigma * np.maximum(v, 0.0)

        def s_prime(v, t):
            return np.zeros_like(np.asarray(v, dtype=float)) + sigma

    else:
        omega = p.omega32

        def m(v, t):
            return (omega - theta * v) * v

        def s(v, t):
            vv = np.maximum(v, 0.0)
            return sigma * vv * np.sqrt(vv)

        def s_prime(v, t):
            return 1.5 * sigma * np.sqrt(np.maximum(v, EPS_STATE))

    return CoefficientSet(m, s, s_prime, jump_c, (0.0, math.inf), name=str(p.variant))


def weibull_pdf(x, lam, k):
    x = np.asarray(x, dtype=float)
    z = x / lam
    return (k / lam) * z ** (k - 1.0) * np.exp(-(z ** k))


def weibull_b1(x, p: ScParams):
    return 2.0 * p.alpha / weibull_pdf(x, p.lambda_w, p.k_w)


def weibull_b2(x, p: ScParams):
    """lambda * Gamma(1 + 1/k, z) - mu_W * exp(-z) with z = (x / lambda)^k."""
    a = 1.0 + 1.0 / p.k_w
    z = (np.asarray(x, dtype=float) / p.lambda_w) ** p.k_w
    return np.exp(-z) * (p.lambda_w * upper_gamma_scaled(a, z) - p.mu_w)


def _weibull_product(x, p: ScParams):
    """b1 * b2 evaluated without forming the tiny/huge factors separately."""
    lam, k = p.lambda_w, p.k_w
    a = 1.0 + 1.0 / k
    x = np.maximum(np.asarray(x, dtype=float), EPS_STATE)
    z = (x / lam) ** k
    pdf_no_exp = (k / lam) * (x / lam) ** (k - 1.0)
    out = np.empty_like(z)
    small = z < a + 1.0
    if small.any():
        zs = z[small]
        # b2 = mu (1 - e^-z) - lam * gamma(a, z); b1 carries e^{+z}
        b2 = p.mu_w * -np.expm1(-zs) - lam * lower_gamma(a, zs)
        out[small] = 2.0 * p.alpha * b2 * np.exp(zs) / pdf_no_exp[small]
    big = ~small
    if big.any():
        zb = z[big]
        out[big] = 2.0 * p.alpha * (lam * upper_gamma_scaled(a, zb) - p.mu_w) / pdf_no_exp[big]
    return np.maximum(out, 0.0)


def sc_coefficients(p: ScParams) -> CoefficientSet:
    v = p.variant
    dom = p.domain
    if v is ScModel.CONSTANT:
        return CoefficientSet(_ZERO, _ZERO, _ZERO, _ZERO, dom, name=str(v))

    kappa, rho_bar, sigma = p.kappa, p.rho_bar, p.sigma

    if v in (ScModel.WRIGHT_FISHER, ScModel.MEAN_REVERTING):
        if v is ScModel.WRIGHT_FISHER:
            def m(r, t):
                return kappa * (rho_bar - r)
        else:
            def m(r, t):
                return kappa * (rho_bar - r) - sigma ** 2 * r

        def s(r, t):
            return sigma * np.sqrt(np.maximum(1.0 - r * r, 0.0))

        def s_prime(r, t):
            return -sigma * r / np.sqrt(np.maximum(1.0 - r * r, EPS_STATE))

    elif v is ScModel.JACOBI:
        hi, lo = p.h, p.f

        def m(r, t):
            return kappa * (rho_bar - r)

        def s(r, t):
            return sigma * np.sqrt(np.maximum((hi - r) * (r - lo), 0.0))

        def s_prime(r, t):
            return sigma * (hi + lo - 2.0 * r) / (2.0 * np.sqrt(np.maximum((hi - r) * (r - lo), EPS_STATE)))

    else:
        alpha, mu_w = p.alpha, p.mu_w
        root = p.weibull_sqrt_diffusion

        def m(r, t):
            return -alpha * (r - mu_w)

        def s(r, t):
            prod = _weibull_product(r, p)
            return np.sqrt(prod) if root else prod

        def s_prime(r, t):
            r = np.asarray(r, dtype=float)
            up = np.minimum(r + WEIBULL_FD_STEP, dom[1])
            dn = np.maximum(r - WEIBULL_FD_STEP, dom[0])
            return (s(up, t) - s(dn, t)) / (up - dn)

    return CoefficientSet(m, s, s_prime, _ZERO, dom, name=str(v))


def ser_coefficients(p: SerParams) -> CoefficientSet:
    sig = p.sigma_fx
    carry = p.r_f - p.r_d - 0.5 * sig * sig

    if p.variant is SerModel.OU:
        theta, mu = p.theta_ou, p.mu_ou

        def m(fx, t):
            return theta * (mu - fx) + fx * carry
    else:
        def m(fx, t):
            return fx * carry

    def s(fx, t):
        return sig * fx

    jump_c = _const(1.0) if p.has_jumps else _ZERO
    return CoefficientSet(m, s, _const(sig), jump_c, (0.0, math.inf), name=str(p.variant))


def asset_coefficients(r: float, v) -> CoefficientSet:
    """Lognormal asset with exogenous instantaneous variance ``v`` (refreshed each step)."""
    vol = np.sqrt(np.maximum(v, 0.0))

    def m(x, t):
        return x * r

    def s(x, t):
        return x * vol

    def s_prime(x, t):
        return np.zeros_like(np.asarray(x, dtype=float)) + vol

    return CoefficientSet(m, s, s_prime, _ZERO, (0.0, math.inf), name="asset")


class Case(str, Enum):
    """Case 1: USD + GBP assets, one FX rate. Case 2 adds a EUR asset and rate."""

    CASE1 = "case1"
    CASE2 = "case2"

    def __str__(self):
        return self.value

    @property
    def n_assets(self) -> int:
        return 2 if self is Case.CASE1 else 3

    @property
    def n_rates(self) -> int:
        return 1 if self is Case.CASE1 else 2

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace(" ", "").replace("_", "")
        if key in ("case1", "1"):
            return cls.CASE1
        if key in ("case2", "2"):
            return cls.CASE2
        raise InvalidParameterError(f"unknown case {value!r}; valid: case1, case2")


@dataclass(frozen=True)
class ModelSpec:
    """One SV model per asset (USD, GBP[, EUR]), one correlation model, one SER model per rate.

    ``sc_eur`` optionally gives the EUR leg its own correlation process
    (driven by the same noise as ``sc``); used for pair-specific Greeks.
    """

    sv: tuple[SvParams, ...]
    sc: ScParams
    ser: tuple[SerParams, ...]
    sc_eur: Optional[ScParams] = None

    def __post_init__(self):
        object.__setattr__(self, "sv", tuple(self.sv))
        object.__setattr__(self, "ser", tuple(self.ser))
        if len({p.variant for p in self.sv}) != 1:
            raise InvalidParameterError("all assets must share one SV variant")
        if len({p.variant for p in self.ser}) != 1:
            raise InvalidParameterError("all FX rates must share one SER variant")
        if len(self.sv) not in (2, 3) or len(self.ser) != len(self.sv) - 1:
            raise InvalidParameterError("need 2 assets/1 rate (case1) or 3 assets/2 rates (case2)")
        if self.sc_eur is not None and self.sc_eur.variant is not self.sc.variant:
            raise InvalidParameterError("sc_eur must use the same correlation variant as sc")

    @property
    def case(self) -> Case:
        return Case.CASE1 if len(self.sv) == 2 else Case.CASE2

    @property
    def sv_variant(self) -> SvModel:
        return self.sv[0].variant

    @property
    def ser_variant(self) -> SerModel:
        return self.ser[0].variant

    @classmethod
    def uniform(cls, sv: SvParams, sc: ScParams, ser: SerParams, case=Case.CASE1):
        case = Case.parse(case)
        return cls((sv,) * case.n_assets, sc, (ser,) * case.n_rates)
