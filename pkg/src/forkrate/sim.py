"""Monte Carlo estimation of the supremum backlog ``Q = max_{0<=t<=horizon} Q_t``.

Paths are generated in fixed-size blocks. Block ``k`` draws from two
independent streams (arrivals, service) seeded by ``SeedSequence(seed,
spawn_key=(k, stream))`` and always produces a full block, so the value of a
path depends only on ``(seed, path index, horizon)``; neither ``n_paths`` nor
the thread count changes it. Draws are laid out time-major, so a longer
horizon extends the same paths instead of resampling them.

Increments per scheme:

* ``iid``: ``Poisson(lambda) - Poisson(mu)``.
* ``ar``: ``lambda_t + chi_t - Poisson(mu_t)`` with the stationary AR(1)
  recursion ``chi_t = xi chi_{t-1} + sqrt(1 - xi^2) sigma_t eps_t`` and
  ``chi_0 ~ Normal(0, sigma_t^2)``. Arrivals may go negative; they are not
  truncated.
* ``many``: aggregate input ``Normal(N lambda_bar, N)`` against
  ``Poisson(N mu_bar)``. ``source_xi`` makes the aggregate AR(1)-correlated
  (exploration only; the default 0 is the model the rate function describes).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats
from scipy.signal import lfilter

from .errors import ConfigError, EmptySamples, ForkRateError, InsufficientPoints
from .params import (
    ArParams,
    IidParams,
    ManyParams,
    Params,
    TailEstimate,
    validate,
)

BLOCK_SIZE = 256
Z_95 = stats.norm.ppf(0.975)
SCHEMES = {"iid": IidParams, "ar": ArParams, "many": ManyParams}


@dataclass(frozen=True)
class SimConfig:
    scheme: str
    params: Params
    horizon: int = 2000
    n_paths: int = 10_000
    seed: int = 0
    omega_grid: tuple = ()
    source_xi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "omega_grid", tuple(float(w) for w in self.omega_grid))


@dataclass(frozen=True, slots=True)
class DecayFit:
    slope: float
    intercept: float
    r_squared: float
    points_used: int
    points_excluded: int = 0


def validate_config(cfg: SimConfig) -> SimConfig:
    cls = SCHEMES.get(cfg.scheme)
    if cls is None:
        raise ConfigError(f"unknown scheme {cfg.scheme!r}; expected one of {sorted(SCHEMES)}")
    if not isinstance(cfg.params, cls):
        raise ConfigError(f"scheme {cfg.scheme!r} needs {cls.__name__}")
    try:
        validate(cfg.params, allow_zero_arrivals=True)
    except ForkRateError as exc:
        raise ConfigError(str(exc)) from None
    if isinstance(cfg.params, ManyParams) and cfg.params.n_sources < 2:
        raise ConfigError("many-source simulation needs n_sources >= 2")
    for name in ("horizon", "n_paths"):
        v = getattr(cfg, name)
        if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
            raise ConfigError(f"{name} must be an integer >= 1, got {v!r}")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, (int, np.integer)) or not (
        0 <= cfg.seed < 2**64
    ):
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {cfg.seed!r}")
    grid = cfg.omega_grid
    if any(not (math.isfinite(w) and w > 0) for w in grid):
        raise ConfigError("omega_grid values must be finite and > 0")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ConfigError("omega_grid must be strictly increasing")
    if not (-1.0 < cfg.source_xi < 1.0):
        raise ConfigError(f"source_xi must lie in (-1, 1), got {cfg.source_xi}")
    if cfg.source_xi != 0.0 and cfg.scheme != "many":
        raise ConfigError("source_xi only applies to the many-source scheme")
    return cfg


def _streams(seed: int, block: int):
    return [
        np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block, s))))
        for s in (0, 1)
    ]


def ar1_noise(rng: np.random.Generator, shape, xi: float, sigma: float) -> np.ndarray:
    """Stationary AR(1) deviations along axis 0 with variance ``sigma^2``.

    Draws ``chi_0`` first, then the innovations, from ``rng``.
    """
    n_steps = shape[0]
    rest = tuple(shape[1:])
    chi0 = rng.standard_normal(rest) * sigma
    eps = rng.standard_normal((n_steps,) + rest) * (math.sqrt(1.0 - xi * xi) * sigma)
    if xi == 0.0:
        return eps
    zi = (xi * chi0)[np.newaxis, ...]
    chi, _ = lfilter([1.0], [1.0, -xi], eps, axis=0, zi=zi)
    return chi


def ar1_arrivals(n_steps: int, p: ArParams, seed: int = 0) -> np.ndarray:
    """One long stationary arrival sequence ``lambda_t + chi_t``."""
    validate(p, allow_zero_arrivals=True)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return p.lambda_t + ar1_noise(rng, (n_steps,), p.xi, p.sigma_t)


def _increments(cfg: SimConfig, block: int) -> np.ndarray:
    arr_rng, srv_rng = _streams(cfg.seed, block)
    shape = (cfg.horizon, BLOCK_SIZE)
    p = cfg.params
    if isinstance(p, IidParams):
        a = arr_rng.poisson(p.lambda_, shape)
        b = srv_rng.poisson(p.mu, shape)
        return (a - b).astype(np.float64)
    if isinstance(p, ArParams):
        a = p.lambda_t + ar1_noise(arr_rng, shape, p.xi, p.sigma_t)
        return a - srv_rng.poisson(p.mu_t, shape)
    n = p.n_sources
    a = n * p.lambda_bar + ar1_noise(arr_rng, shape, cfg.source_xi, math.sqrt(n))
    return a - srv_rng.poisson(n * p.mu_bar, shape)


def _block_suprema(cfg: SimConfig, block: int) -> np.ndarray:
    q = np.cumsum(_increments(cfg, block), axis=0)
    return np.maximum(q.max(axis=0), 0.0)


def thread_count(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get("FORKRATE_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def simulate_paths(cfg: SimConfig, threads: Optional[int] = None) -> np.ndarray:
    """Supremum backlog of each path, ordered by path index."""
    validate_config(cfg)
    n_blocks = -(-cfg.n_paths // BLOCK_SIZE)
    workers = min(thread_count(threads), n_blocks)
    if workers == 1:
        blocks = [_block_suprema(cfg, k) for k in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda k: _block_suprema(cfg, k), range(n_blocks)))
    return np.concatenate(blocks)[: cfg.n_paths]


def _count_above(sorted_samples: np.ndarray, omega: float) -> int:
    return int(sorted_samples.size - np.searchsorted(sorted_samples, omega, side="right"))


def estimate_tail(samples: Sequence[float], omega: float, horizon: int = 0) -> TailEstimate:
    """Empirical ``P(Q > omega)`` with a 95% Wilson score half-width.

    With no exceedances ``p_hat`` is 0 and ``ci_half_width`` is the exact
    one-sided 95% upper bound ``1 - 0.05**(1/n)``.
    """
    s = np.sort(np.asarray(samples, dtype=float))
    n = s.size
    if n == 0:
        raise EmptySamples("no samples to estimate from")
    k = _count_above(s, omega)
    p = k / n
    if k == 0:
        half = 1.0 - 0.05 ** (1.0 / n)
    else:
        z2 = Z_95 * Z_95
        half = Z_95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n)
    return TailEstimate(
        omega=float(omega), p_hat=p, ci_half_width=half, n_paths=n, horizon=horizon, exceedances=k
    )


def tail_table(samples: np.ndarray, cfg: SimConfig) -> list:
    s = np.sort(samples)
    return [estimate_tail(s, w, cfg.horizon) for w in cfg.omega_grid]


def fit_decay_rate(estimates: Sequence[TailEstimate]) -> DecayFit:
    """Least-squares line through ``(omega, -log p_hat)``; zero estimates are dropped."""
    used = [e for e in estimates if e.p_hat > 0]
    if len(used) < 2:
        raise InsufficientPoints(f"need >= 2 positive estimates, got {len(used)}")
    x = np.array([e.omega for e in used])
    y = -np.log([e.p_hat for e in used])
    if np.ptp(x) == 0:
        raise InsufficientPoints("all positive estimates share one omega")
    fit = stats.linregress(x, y)
    r2 = 1.0 if np.ptp(y) == 0 else min(1.0, max(0.0, fit.rvalue**2))
    return DecayFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r_squared=float(r2),
        points_used=len(used),
        points_excluded=len(estimates) - len(used),
    )


def samples_summary(samples: np.ndarray) -> dict:
    return {
        "mean_q": float(np.mean(samples)),
        "std_q": float(np.std(samples)),
        "max_q": float(np.max(samples)),
        "p_zero": float(np.mean(samples == 0)),
    }
