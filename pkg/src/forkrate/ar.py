"""Single-source non-i.i.d. scheme: AR(1) block creation, Poisson dissemination.

The arrival cumulant is the unit-variance one, ``theta*lam + theta^2/2 *
(1+xi)/(1-xi)``; ``ArParams.sigma_t`` is not read here.

Sign convention: the decay statement for this scheme is read the same way as
for the i.i.d. scheme, ``P(Q > r b) ~ exp(-r I(b))`` with ``I(b) >= 0``.
"""

from __future__ import annotations

import math
from typing import Tuple, Union

from . import _gauss_poisson as core
from .errors import NegativeDiscriminant, NonPositiveRate
from .params import ArParams, Mode, RateResult, validate


def _variance_factor(xi: float) -> float:
    return (1.0 + xi) / (1.0 - xi)


def _precision(p: ArParams) -> float:
    return (1.0 - p.xi) / (1.0 + p.xi)


def _check_rate_params(p: ArParams) -> None:
    validate(p, stable=True)
    if p.sigma_t == 0:
        raise NonPositiveRate("sigma_t = 0 is a simulator-only degenerate case")


def cumulant_ar_arrivals(theta: float, p: ArParams) -> float:
    validate(p)
    return theta * p.lambda_t + theta * theta / 2.0 * _variance_factor(p.xi)


def cumulant_ar_increment(theta: float, p: ArParams) -> float:
    """Cumulant of ``a_t - b_t`` with Poisson service."""
    return cumulant_ar_arrivals(theta, p) + p.mu_t * math.expm1(-theta)


def conjugate_ar_arrivals(x: float, p: ArParams) -> float:
    validate(p)
    return (x - p.lambda_t) ** 2 * (1.0 - p.xi) / (2.0 * (1.0 + p.xi))


def gamma_ar(y: float, x: float, p: ArParams) -> float:
    """Objective whose infimum over ``y > x`` is the queue conjugate at ``x``."""
    validate(p)
    return core.gamma(y, x, p.lambda_t, p.mu_t, _precision(p))


def stationarity_ar(y: float, x: float, p: ArParams) -> float:
    """Exact first-order condition ``(1-xi)/(1+xi) (y - lam) + log((y - x)/mu)``."""
    return core.stationarity(y, x, p.lambda_t, p.mu_t, _precision(p))


def taylor_condition_ar(y: float, x: float, p: ArParams) -> float:
    return core.taylor_condition(y, x, p.lambda_t, p.mu_t, _precision(p))


def taylor_roots_ar(x: float, p: ArParams) -> Tuple[float, float]:
    """Both roots of the Taylor-expanded first-order condition (minus branch first)."""
    validate(p)
    xi, lam, mu = p.xi, p.lambda_t, p.mu_t
    disc = (
        1 + 2 * xi + xi**2 - 2 * lam + 2 * xi**2 * lam + 4 * mu - 4 * xi**2 * mu
        + mu**2 - 2 * xi * mu**2 + xi**2 * mu**2 + 2 * x - 2 * xi**2 * x
    )
    if disc < 0:
        raise NegativeDiscriminant(f"Taylor discriminant is {disc} at x={x}")
    root = math.sqrt(disc)
    base = 2 * mu + 2 * xi * mu + mu**2 - xi * mu**2 + x + xi * x
    return (base - mu * root) / (1 + xi), (base + mu * root) / (1 + xi)


def _taylor_root(p: ArParams):
    return lambda x: taylor_roots_ar(x, p)[0]


def conjugate_ar_queue(
    x: float, p: ArParams, mode: Union[Mode, str] = Mode.EXACT
) -> Tuple[float, float]:
    """Queue conjugate at ``x`` and the inner minimizer ``y``.

    The exact mode solves the transcendental first-order condition; the Taylor
    mode plugs the minus-branch Taylor root into Gamma, so its value is never
    below the exact one.
    """
    validate(p)
    mode = Mode(mode)
    return core.queue_conjugate(
        x, p.lambda_t, p.mu_t, _precision(p), mode, _taylor_root(p)
    )


def rate_ar(b: float, p: ArParams, mode: Union[Mode, str] = Mode.EXACT) -> RateResult:
    """``I(b) = inf_t t * conj(b/t)``; needs ``0 < b < lambda_t < mu_t``."""
    _check_rate_params(p)
    core.check_threshold(b, p.lambda_t, "b")
    return core.rate(b, p.lambda_t, p.mu_t, _precision(p), Mode(mode), _taylor_root(p))


def objective_ar(
    t: float, b: float, p: ArParams, mode: Union[Mode, str] = Mode.EXACT
) -> Tuple[float, float]:
    """The un-minimized time objective ``t * conj(b/t)`` and its inner minimizer."""
    _check_rate_params(p)
    core.check_threshold(b, p.lambda_t, "b")
    return core.objective(
        t, b, p.lambda_t, p.mu_t, _precision(p), Mode(mode), _taylor_root(p)
    )
