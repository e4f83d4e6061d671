"""Scheme-agnostic 1-D kernels: golden-section minimization, numerical
Legendre transform, bracketed roots and the infimum over time."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import BracketEscape, NonFinite, NoSignChange

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

DEFAULT_MIN_TOL = 1e-9
DEFAULT_ROOT_TOL = 1e-8
DEFAULT_T_BRACKET = (1e-3, 4000.0)
DEFAULT_T_GRID = 200
DEFAULT_T_TOL = 1e-8
DEFAULT_THETA_BRACKET = (-50.0, 50.0)


@dataclass(frozen=True, slots=True)
class Bracket:
    lo: float
    hi: float
    tol_rel: float = DEFAULT_MIN_TOL

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ValueError(f"bracket needs lo < hi, got [{self.lo}, {self.hi}]")
        if not self.tol_rel > 0:
            raise ValueError(f"tol_rel must be > 0, got {self.tol_rel}")

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True, slots=True)
class MinResult:
    argmin: float
    min_value: float
    evaluations: int
    converged: bool
    # "lower" / "upper" when the minimum sits at an edge of the search range
    boundary: Optional[str] = None


def _finite(f: Callable[[float], float], x: float) -> float:
    try:
        v = float(f(x))
    except OverflowError:
        v = math.inf
    if not math.isfinite(v):
        raise NonFinite(f"objective is {v} at {x!r}")
    return v


def minimize_convex_1d(
    f: Callable[[float], float], bracket: Bracket, max_iter: int = 400
) -> MinResult:
    """Golden-section search for the minimum of a unimodal ``f`` on ``bracket``.

    Stops when the bracket width drops below ``tol_rel * max(1, |x|)``.
    """
    lo, hi = bracket.lo, bracket.hi
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = _finite(f, x1), _finite(f, x2)
    evals = 2
    converged = False
    for _ in range(max_iter):
        if hi - lo <= bracket.tol_rel * max(1.0, abs(0.5 * (lo + hi))):
            converged = True
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = _finite(f, x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = _finite(f, x2)
        evals += 1
    if f1 <= f2:
        return MinResult(x1, f1, evals, converged)
    return MinResult(x2, f2, evals, converged)


def sup_conjugate(
    cumulant: Callable[[float], float],
    x: float,
    theta_bracket: Optional[Bracket] = None,
) -> float:
    """Numerical Legendre transform ``sup_theta {theta*x - cumulant(theta)}``.

    Meant as an oracle for closed-form conjugates. If the maximizer lands on a
    bracket edge the bracket is doubled once before giving up.
    """
    if theta_bracket is None:
        theta_bracket = Bracket(*DEFAULT_THETA_BRACKET, tol_rel=DEFAULT_MIN_TOL)

    def neg(theta: float) -> float:
        return cumulant(theta) - theta * x

    br = theta_bracket
    for attempt in range(2):
        res = minimize_convex_1d(neg, br)
        edge = 1e-6 * br.width
        if br.lo + edge < res.argmin < br.hi - edge:
            return -res.min_value
        if attempt == 0:
            mid, half = 0.5 * (br.lo + br.hi), br.width
            br = Bracket(mid - half, mid + half, br.tol_rel)
    raise BracketEscape(f"supremum for x={x} escapes theta bracket [{br.lo}, {br.hi}]")


def solve_bracketed_root(g: Callable[[float], float], bracket: Bracket) -> float:
    """Root of a continuous ``g`` with a sign change on ``bracket`` (Brent's method)."""
    glo, ghi = _finite(g, bracket.lo), _finite(g, bracket.hi)
    if glo == 0.0:
        return bracket.lo
    if ghi == 0.0:
        return bracket.hi
    if glo * ghi > 0:
        raise NoSignChange(
            f"g({bracket.lo})={glo:.3g} and g({bracket.hi})={ghi:.3g} share a sign"
        )
    rtol = max(bracket.tol_rel, 4.0 * np.finfo(float).eps)
    return float(brentq(g, bracket.lo, bracket.hi, xtol=1e-300, rtol=rtol, maxiter=500))


def time_profile(
    conj: Callable[[float], float],
    a: float,
    t_bracket: Optional[Bracket] = None,
    n_grid: int = DEFAULT_T_GRID,
):
    """The objective ``t * conj(a / t)`` on a log-spaced time grid."""
    if t_bracket is None:
        t_bracket = Bracket(*DEFAULT_T_BRACKET, tol_rel=DEFAULT_T_TOL)
    ts = np.geomspace(t_bracket.lo, t_bracket.hi, n_grid)
    hs = np.array([t * _finite(conj, a / t) for t in ts])
    return ts, hs


def infimum_over_time(
    conj: Callable[[float], float],
    a: float,
    t_bracket: Optional[Bracket] = None,
    n_grid: int = DEFAULT_T_GRID,
) -> MinResult:
    """Minimize ``h(t) = t * conj(a / t)`` over ``t`` in ``t_bracket``.

    A log-spaced grid locates the basin and golden-section refines between the
    neighbours of the best grid point. Minima within 1% of a bracket edge are
    flagged through ``converged=False`` and ``boundary``.
    """
    if not a > 0:
        raise ValueError(f"a must be > 0, got {a}")
    if t_bracket is None:
        t_bracket = Bracket(*DEFAULT_T_BRACKET, tol_rel=DEFAULT_T_TOL)
    ts, hs = time_profile(conj, a, t_bracket, n_grid)
    i = int(np.argmin(hs))
    best_t, best_h = float(ts[i]), float(hs[i])
    evals = n_grid

    lo, hi = float(ts[max(i - 1, 0)]), float(ts[min(i + 1, n_grid - 1)])
    refined = minimize_convex_1d(
        lambda t: t * conj(a / t), Bracket(lo, hi, t_bracket.tol_rel)
    )
    evals += refined.evaluations
    converged = refined.converged
    if refined.min_value <= best_h:
        best_t, best_h = refined.argmin, refined.min_value

    boundary = None
    if best_t <= t_bracket.lo * 1.01:
        boundary = "lower"
    elif best_t >= t_bracket.hi * 0.99:
        boundary = "upper"
    return MinResult(best_t, best_h, evals, converged and boundary is None, boundary)
