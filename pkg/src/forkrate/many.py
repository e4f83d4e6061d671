"""Many-source non-i.i.d. scheme: stationary Gaussian per-source input.

With the scaling function ``v_t = t^2 / varsigma(t)`` the scaled cumulant is
``theta*lam_bar + theta^2/2`` whatever the covariance of the scaled input, so
no covariance parameter appears here. The regularity conditions behind the
generalized Cramer theorem (finite log-MGF near 0, existence and smoothness of
the many-source limit, uniform convergence under ``v_t``) hold for the
Gaussian model by construction and are not checked at runtime.
"""

from __future__ import annotations

import math
from typing import Tuple, Union

from . import _gauss_poisson as core
from .errors import NegativeDiscriminant
from .params import ManyParams, Mode, RateResult, validate

_C = 1.0


def cumulant_many_arrivals(theta: float, p: ManyParams) -> float:
    validate(p)
    return theta * p.lambda_bar + 0.5 * theta * theta


def cumulant_many_increment(theta: float, p: ManyParams) -> float:
    return cumulant_many_arrivals(theta, p) + p.mu_bar * math.expm1(-theta)


def conjugate_many_arrivals(x: float, p: ManyParams) -> float:
    validate(p)
    return 0.5 * (x - p.lambda_bar) ** 2


def gamma_many(y: float, x: float, p: ManyParams) -> float:
    validate(p)
    return core.gamma(y, x, p.lambda_bar, p.mu_bar, _C)


def stationarity_many(y: float, x: float, p: ManyParams) -> float:
    return core.stationarity(y, x, p.lambda_bar, p.mu_bar, _C)


def taylor_condition_many(y: float, x: float, p: ManyParams) -> float:
    return core.taylor_condition(y, x, p.lambda_bar, p.mu_bar, _C)


def taylor_roots_many(x: float, p: ManyParams) -> Tuple[float, float]:
    validate(p)
    lam, mu = p.lambda_bar, p.mu_bar
    disc = 1 - 2 * lam + 4 * mu + mu**2 + 2 * x
    if disc < 0:
        raise NegativeDiscriminant(f"Taylor discriminant is {disc} at x={x}")
    w = math.sqrt(disc)
    base = 2 * mu + mu**2 + x
    return base - mu * w, base + mu * w


def _taylor_root(p: ManyParams):
    return lambda x: taylor_roots_many(x, p)[0]


def conjugate_many_queue(
    x: float, p: ManyParams, mode: Union[Mode, str] = Mode.EXACT
) -> Tuple[float, float]:
    validate(p)
    return core.queue_conjugate(
        x, p.lambda_bar, p.mu_bar, _C, Mode(mode), _taylor_root(p)
    )


def rate_many(u: float, p: ManyParams, mode: Union[Mode, str] = Mode.EXACT) -> RateResult:
    """``I(u) = inf_t t * conj(u/t)``; needs ``0 < u < lambda_bar < mu_bar``."""
    validate(p, stable=True)
    core.check_threshold(u, p.lambda_bar, "u")
    return core.rate(u, p.lambda_bar, p.mu_bar, _C, Mode(mode), _taylor_root(p))


def objective_many(
    t: float, u: float, p: ManyParams, mode: Union[Mode, str] = Mode.EXACT
) -> Tuple[float, float]:
    validate(p, stable=True)
    core.check_threshold(u, p.lambda_bar, "u")
    return core.objective(
        t, u, p.lambda_bar, p.mu_bar, _C, Mode(mode), _taylor_root(p)
    )
