"""Shared kernel for Gaussian-cumulant arrivals against Poisson service.

Arrivals have conjugate ``c (y - lam)^2 / 2``; ``c`` is ``(1 - xi)/(1 + xi)``
for the AR(1) scheme and 1 for the many-source scheme. The queue conjugate is
``inf_y Gamma(y)`` with

    Gamma(y) = c (y - lam)^2 / 2 + (y - x) log((y - x)/mu) + mu - (y - x),  y > x.

The exact minimizer solves ``c (y - lam) + log((y - x)/mu) = 0``. It is found
in the log-offset ``u = log(y - x)`` where the condition is strictly increasing
on the whole real line, so a bracket always exists and the minimizer can sit
arbitrarily close to ``x`` without underflow trouble.
"""

from __future__ import annotations

import math
from typing import Callable, Tuple

from . import numerics
from .errors import DomainError, Infeasible, NegativeArgument
from .numerics import Bracket
from .params import Mode, RateResult

# Tight enough that the first-order residual at the root is ~1e-13.
EXACT_ROOT_TOL = 1e-14


def gamma(y: float, x: float, lam: float, mu: float, c: float) -> float:
    s = y - x
    if not s > 0:
        raise DomainError(f"Gamma needs y > x, got y={y}, x={x}")
    return c * (y - lam) ** 2 / 2.0 + s * math.log(s / mu) + mu - s


def stationarity(y: float, x: float, lam: float, mu: float, c: float) -> float:
    s = y - x
    if not s > 0:
        raise DomainError(f"stationarity condition needs y > x, got y={y}, x={x}")
    return c * (y - lam) + math.log(s / mu)


def taylor_condition(y: float, x: float, lam: float, mu: float, c: float) -> float:
    """Stationarity with the logarithm replaced by its 2nd-order expansion at 1."""
    d = (y - x) / mu - 1.0
    return c * (y - lam) + d - d * d / 2.0


def taylor_x_max(lam: float, c: float) -> float:
    """Largest x for which the minus-branch Taylor root stays above x."""
    return lam + 1.5 / c


def exact_minimizer(x: float, lam: float, mu: float, c: float) -> Tuple[float, float]:
    """Return ``(min Gamma, argmin y)`` by solving the first-order condition.

    The value is computed from the log-offset directly. For ``x`` far above
    ``lam`` the offset ``y - x`` can drop below the float resolution of ``y``,
    so the returned ``y`` may round to ``x`` even though the value is accurate.
    """
    log_mu = math.log(mu)
    drift = c * (x - lam)

    def g(u: float) -> float:
        return c * (x - lam + math.exp(u)) + u - log_mu

    # g(u_lo) <= -1 and g(u_hi) > 0 by construction
    u_lo = min(-math.log(c), log_mu - drift - 2.0)
    u_hi = math.log(max(lam - x, 0.0) + mu + 1.0)
    u = numerics.solve_bracketed_root(g, Bracket(u_lo, u_hi, EXACT_ROOT_TOL))
    s = math.exp(u)
    value = c * (x + s - lam) ** 2 / 2.0 + s * (u - log_mu) + mu - s
    return value, x + s


def queue_conjugate(
    x: float,
    lam: float,
    mu: float,
    c: float,
    mode: Mode,
    taylor_root: Callable[[float], float],
) -> Tuple[float, float]:
    if mode is Mode.EXACT:
        return exact_minimizer(x, lam, mu, c)
    if mode is Mode.TAYLOR:
        y1 = taylor_root(x)
        return gamma(y1, x, lam, mu, c), y1
    raise ValueError(f"unsupported mode {mode!r}")


def check_threshold(a: float, lam: float, name: str) -> None:
    if not a > 0:
        raise NegativeArgument(f"{name} must be > 0, got {a}")
    if not lam > a:
        raise Infeasible(f"{name}={a} must stay below the arrival mean {lam}")


def time_bracket(a: float, lam: float, c: float, mode: Mode) -> Bracket:
    lo, hi = numerics.DEFAULT_T_BRACKET
    if mode is Mode.TAYLOR:
        # below this t the Taylor root falls under x = a/t and Gamma is undefined
        lo = max(lo, a / taylor_x_max(lam, c) * (1.0 + 1e-9))
    return Bracket(lo, hi, numerics.DEFAULT_T_TOL)


def rate(
    a: float,
    lam: float,
    mu: float,
    c: float,
    mode: Mode,
    taylor_root: Callable[[float], float],
) -> RateResult:
    def conj(x: float) -> float:
        return queue_conjugate(x, lam, mu, c, mode, taylor_root)[0]

    res = numerics.infimum_over_time(conj, a, time_bracket(a, lam, c, mode))
    _, y_star = queue_conjugate(a / res.argmin, lam, mu, c, mode, taylor_root)
    return RateResult(
        value=res.min_value,
        t_star=res.argmin,
        y_star=y_star,
        mode=mode,
        interior=res.boundary is None,
    )


def objective(
    t: float,
    a: float,
    lam: float,
    mu: float,
    c: float,
    mode: Mode,
    taylor_root: Callable[[float], float],
) -> Tuple[float, float]:
    """``t * conj(a/t)`` at a single time, with the inner minimizer."""
    if not t > 0:
        raise NegativeArgument(f"t must be > 0, got {t}")
    value, y = queue_conjugate(a / t, lam, mu, c, mode, taylor_root)
    return t * value, y
