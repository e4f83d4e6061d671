"""Parameter and result records shared by the analysis and simulation modules.

Records are frozen dataclasses. Construction only coerces types; the
invariants are enforced by :func:`validate`, which every rate operation calls
with ``stable=True``. That split lets the simulator accept degenerate inputs
(zero arrivals, zero variance) that the rate functions reject.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from enum import Enum
from typing import Any, Mapping, Optional, Union

from .errors import ConfigError, NonPositiveRate, Unstable, XiOutOfRange


class Mode(str, Enum):
    CLOSED_FORM = "closed_form"
    EXACT = "exact_numeric"
    TAYLOR = "taylor"


@dataclass(frozen=True, slots=True)
class IidParams:
    """Poisson block creation (mean ``lambda_``) against Poisson dissemination (mean ``mu``)."""

    lambda_: float
    mu: float

    def __post_init__(self):
        object.__setattr__(self, "lambda_", float(self.lambda_))
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def stable(self) -> bool:
        return self.mu > self.lambda_

    @property
    def arrival_mean(self) -> float:
        return self.lambda_

    @property
    def service_mean(self) -> float:
        return self.mu


@dataclass(frozen=True, slots=True)
class ArParams:
    """AR(1) block creation around ``lambda_t`` with Poisson dissemination of mean ``mu_t``.

    ``sigma_t`` only drives the simulator; the rate functions use the
    unit-variance cumulant and ignore it (but reject ``sigma_t == 0``).
    """

    lambda_t: float
    mu_t: float
    xi: float = 0.0
    sigma_t: float = 1.0

    def __post_init__(self):
        for f in ("lambda_t", "mu_t", "xi", "sigma_t"):
            object.__setattr__(self, f, float(getattr(self, f)))

    @property
    def stable(self) -> bool:
        return self.mu_t > self.lambda_t

    @property
    def arrival_mean(self) -> float:
        return self.lambda_t

    @property
    def service_mean(self) -> float:
        return self.mu_t


@dataclass(frozen=True, slots=True)
class ManyParams:
    """Stationary Gaussian per-source input ``lambda_bar`` against service ``mu_bar``.

    ``n_sources`` is read only by the simulator.
    """

    lambda_bar: float
    mu_bar: float
    n_sources: int = 10

    def __post_init__(self):
        object.__setattr__(self, "lambda_bar", float(self.lambda_bar))
        object.__setattr__(self, "mu_bar", float(self.mu_bar))
        if isinstance(self.n_sources, float) and not self.n_sources.is_integer():
            raise ConfigError(f"n_sources must be an integer, got {self.n_sources}")
        object.__setattr__(self, "n_sources", int(self.n_sources))

    @property
    def stable(self) -> bool:
        return self.mu_bar > self.lambda_bar

    @property
    def arrival_mean(self) -> float:
        return self.lambda_bar

    @property
    def service_mean(self) -> float:
        return self.mu_bar


Params = Union[IidParams, ArParams, ManyParams]

# JSON keys that differ from the attribute name
_JSON_ALIASES = {IidParams: {"lambda": "lambda_"}}


def _check_rate(name: str, value: float, *, allow_zero: bool = False) -> None:
    if not math.isfinite(value):
        raise NonPositiveRate(f"{name} must be finite, got {value}")
    if value < 0 or (value == 0 and not allow_zero):
        raise NonPositiveRate(f"{name} must be > 0, got {value}")


def validate(params: Params, *, stable: bool = False, allow_zero_arrivals: bool = False) -> Params:
    """Check the record's invariants and return it unchanged.

    ``stable=True`` additionally demands service mean > arrival mean, as every
    rate or design computation does. ``allow_zero_arrivals`` is for the
    simulator's degenerate no-arrival case.
    """
    if isinstance(params, IidParams):
        _check_rate("lambda", params.lambda_, allow_zero=allow_zero_arrivals)
        _check_rate("mu", params.mu)
    elif isinstance(params, ArParams):
        _check_rate("lambda_t", params.lambda_t, allow_zero=allow_zero_arrivals)
        _check_rate("mu_t", params.mu_t)
        if not (-1.0 < params.xi < 1.0):
            raise XiOutOfRange(f"xi must lie in (-1, 1), got {params.xi}")
        if not math.isfinite(params.sigma_t) or params.sigma_t < 0:
            raise NonPositiveRate(f"sigma_t must be >= 0, got {params.sigma_t}")
    elif isinstance(params, ManyParams):
        _check_rate("lambda_bar", params.lambda_bar, allow_zero=allow_zero_arrivals)
        _check_rate("mu_bar", params.mu_bar)
    else:
        raise TypeError(f"not a parameter record: {params!r}")
    if stable and not params.stable:
        raise Unstable(
            f"service mean {params.service_mean} must exceed arrival mean {params.arrival_mean}"
        )
    return params


def params_from_dict(cls: type, data: Mapping[str, Any]):
    """Build a parameter record from a JSON-style mapping; unknown keys are rejected."""
    aliases = _JSON_ALIASES.get(cls, {})
    names = {f.name for f in fields(cls)}
    kwargs = {}
    for key, value in data.items():
        attr = aliases.get(key, key)
        if attr not in names:
            raise ConfigError(f"unknown parameter {key!r} for {cls.__name__}")
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"parameter {key!r} must be numeric, got {value!r}")
        kwargs[attr] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"incomplete parameters for {cls.__name__}: {exc}") from None


def params_to_dict(params: Params) -> dict:
    inverse = {v: k for k, v in _JSON_ALIASES.get(type(params), {}).items()}
    return {inverse.get(k, k): v for k, v in asdict(params).items()}


@dataclass(frozen=True, slots=True)
class RateResult:
    """A rate-function value with its minimizing time and inner minimizer.

    ``interior`` is False when the time search bottomed out at an edge of its
    bracket, in which case ``value`` is only an upper bound on the infimum.
    """

    value: float
    t_star: float
    y_star: Optional[float]
    mode: Mode
    interior: bool = True

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "t_star": self.t_star,
            "y_star": self.y_star,
            "mode": self.mode.value,
            "interior": self.interior,
        }


@dataclass(frozen=True, slots=True)
class TailEstimate:
    omega: float
    p_hat: float
    ci_half_width: float
    n_paths: int
    horizon: int
    exceedances: int = 0
