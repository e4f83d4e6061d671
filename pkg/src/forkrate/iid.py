"""Single-source i.i.d. scheme: Poisson creation against Poisson dissemination.

All logarithms are natural. :func:`forking_probability_iid` is the
large-deviation approximation ``exp(-omega * log(mu/lambda))``; it drops the
sub-exponential prefactor and is not an exact tail probability.
"""

from __future__ import annotations

import math

from .errors import DeltaOutOfRange, NegativeArgument, NonPositiveRate
from .params import IidParams, Mode, RateResult, validate


def cumulant_poisson_arrivals(theta: float, lam: float) -> float:
    """Per-period cumulant ``lam * (e^theta - 1)`` of a Poisson count."""
    if not lam > 0:
        raise NonPositiveRate(f"rate must be > 0, got {lam}")
    return lam * math.expm1(theta)


def cumulant_queue_increment(theta: float, p: IidParams) -> float:
    """Cumulant of one backlog increment ``a_t - b_t``."""
    validate(p)
    return p.lambda_ * math.expm1(theta) + p.mu * math.expm1(-theta)


def conjugate_poisson(x: float, rate: float) -> float:
    """Legendre transform of the Poisson cumulant: ``x log(x/rate) + rate - x``."""
    if x < 0:
        raise NegativeArgument(f"x must be >= 0, got {x}")
    if not rate > 0:
        raise NonPositiveRate(f"rate must be > 0, got {rate}")
    if x == 0:
        return rate
    return x * math.log(x / rate) + rate - x


def conjugate_queue_increment(x: float, p: IidParams) -> float:
    """Closed-form conjugate of the backlog increment.

    ``lambda + mu - psi + x log((x + psi) / (2 lambda))`` with
    ``psi = sqrt(x^2 + 4 lambda mu)``; zero at the drift ``lambda - mu``.
    """
    validate(p)
    lam, mu = p.lambda_, p.mu
    psi = math.sqrt(x * x + 4.0 * lam * mu)
    # x + psi loses digits for very negative x; use the conjugate form there
    if x < 0:
        ratio = 2.0 * mu / (psi - x)
    else:
        ratio = (x + psi) / (2.0 * lam)
    return lam + mu - psi + x * math.log(ratio)


def rate_iid(q: float, p: IidParams) -> RateResult:
    """``I(q) = q log(mu/lambda)``, attained at ``t* = q / (mu - lambda)``."""
    validate(p, stable=True)
    if not q > 0:
        raise NegativeArgument(f"q must be > 0, got {q}")
    return RateResult(
        value=q * math.log(p.mu / p.lambda_),
        t_star=q / (p.mu - p.lambda_),
        y_star=None,
        mode=Mode.CLOSED_FORM,
    )


def forking_probability_iid(omega: float, p: IidParams) -> float:
    """LDP approximation of ``P(Q > omega)``, i.e. ``(lambda/mu)^omega``."""
    validate(p, stable=True)
    if omega < 0:
        raise NegativeArgument(f"omega must be >= 0, got {omega}")
    return math.exp(-omega * math.log(p.mu / p.lambda_))


def _check_delta(delta: float) -> None:
    if not (0.0 < delta <= 1.0):
        raise DeltaOutOfRange(f"delta must lie in (0, 1], got {delta}")


def effective_omega(delta: float, p: IidParams) -> float:
    """Smallest tolerable backlog keeping the forking probability at most ``delta``."""
    _check_delta(delta)
    validate(p, stable=True)
    return -math.log(delta) / math.log(p.mu / p.lambda_)


def effective_mu(delta: float, lam: float, omega: float) -> float:
    """Smallest dissemination rate keeping the forking probability at most ``delta``."""
    _check_delta(delta)
    if not lam > 0:
        raise NonPositiveRate(f"lambda must be > 0, got {lam}")
    if not omega > 0:
        raise NegativeArgument(f"omega must be > 0, got {omega}")
    return lam * math.exp(-math.log(delta) / omega)
