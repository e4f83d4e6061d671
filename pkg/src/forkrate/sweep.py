"""Parameter grids over the rate functions, including the figure presets.

Sweep parameters use the CLI names: ``lambda``, ``mu``, ``xi``, the threshold
(``q``/``b``/``u`` for iid/ar/many), the rate gap (``k`` for iid/ar, ``h``
for many; ``mu = lambda + gap``) and ``t``. When ``t`` is swept the row holds
the un-minimized objective ``t * conj(threshold/t)`` at that time (the
quantity plotted against t in the figures), and ``t_star`` echoes ``t``.

Presets use ``lambda = 1`` for the i.i.d. scheme and ``lambda = 30`` for the
others so that every threshold on the grid stays below the arrival mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import ar, iid, many
from .errors import ConfigError, ForkRateError, NegativeArgument
from .params import ArParams, IidParams, ManyParams, Mode

THRESHOLD = {"iid": "q", "ar": "b", "many": "u"}
GAP = {"iid": "k", "ar": "k", "many": "h"}
_EXTRA = {"iid": set(), "ar": {"xi", "sigma"}, "many": set()}


def parameter_names(scheme: str) -> set:
    return {"lambda", "mu", "t", THRESHOLD[scheme], GAP[scheme]} | _EXTRA[scheme]


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class SweepSpec:
    scheme: str
    axes: Tuple[Axis, ...]
    fixed: Dict[str, float] = field(default_factory=dict)
    mode: Mode = Mode.EXACT
    label: str = ""

    def __post_init__(self):
        if self.scheme not in THRESHOLD:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "axes", tuple(self.axes))
        names = parameter_names(self.scheme)
        if not 1 <= len(self.axes) <= 2:
            raise ConfigError("a sweep needs one or two axes")
        seen = set(self.fixed)
        for ax in self.axes:
            if ax.name not in names:
                raise ConfigError(f"{ax.name!r} is not a {self.scheme} parameter; use {sorted(names)}")
            if ax.name in seen:
                raise ConfigError(f"parameter {ax.name!r} given twice")
            if isinstance(ax.steps, bool) or not isinstance(ax.steps, int) or ax.steps < 2:
                raise ConfigError(f"axis {ax.name!r} needs steps >= 2, got {ax.steps!r}")
            if not (math.isfinite(ax.min) and math.isfinite(ax.max) and ax.min < ax.max):
                raise ConfigError(f"axis {ax.name!r} needs finite min < max")
            seen.add(ax.name)
        for key in self.fixed:
            if key not in names:
                raise ConfigError(f"{key!r} is not a {self.scheme} parameter; use {sorted(names)}")
        if "mu" in seen and GAP[self.scheme] in seen:
            raise ConfigError(f"give either mu or {GAP[self.scheme]}, not both")
        for needed in ("lambda", THRESHOLD[self.scheme]):
            if needed not in seen:
                raise ConfigError(f"sweep needs a value for {needed!r}")
        if "mu" not in seen and GAP[self.scheme] not in seen:
            raise ConfigError(f"sweep needs mu or {GAP[self.scheme]}")

    @property
    def effective_mode(self) -> Mode:
        return Mode.CLOSED_FORM if self.scheme == "iid" else self.mode


@dataclass(frozen=True, slots=True)
class SweepRow:
    coords: Tuple[float, ...]
    value: float
    t_star: float
    y_star: Optional[float]


def evaluate_point(scheme: str, point: Dict[str, float], mode: Mode) -> SweepRow:
    """Rate (or time objective when ``t`` is given) at one parameter point."""
    lam = point["lambda"]
    gap = GAP[scheme]
    mu = point["mu"] if "mu" in point else lam + point[gap]
    a = point[THRESHOLD[scheme]]
    t = point.get("t")
    if scheme == "iid":
        p = IidParams(lam, mu)
        if t is None:
            r = iid.rate_iid(a, p)
            return SweepRow((), r.value, r.t_star, None)
        iid.rate_iid(a, p)  # same feasibility checks as the rate itself
        if not t > 0:
            raise NegativeArgument(f"t must be > 0, got {t}")
        return SweepRow((), t * iid.conjugate_queue_increment(a / t, p), t, None)
    if scheme == "ar":
        p = ArParams(lam, mu, point.get("xi", 0.0), point.get("sigma", 1.0))
        rate_fn, obj_fn = ar.rate_ar, ar.objective_ar
    else:
        p = ManyParams(lam, mu)
        rate_fn, obj_fn = many.rate_many, many.objective_many
    if t is None:
        r = rate_fn(a, p, mode)
        return SweepRow((), r.value, r.t_star, r.y_star)
    value, y = obj_fn(t, a, p, mode)
    return SweepRow((), value, t, y)


def run_sweep(spec: SweepSpec) -> Tuple[List[SweepRow], List[Tuple[Tuple[float, ...], str]]]:
    """Evaluate the grid row-major. Infeasible points are skipped and reported."""
    grids = [ax.values() for ax in spec.axes]
    rows, skipped = [], []
    for coords in _product(grids):
        point = dict(spec.fixed)
        point.update({ax.name: float(v) for ax, v in zip(spec.axes, coords)})
        coords = tuple(float(c) for c in coords)
        try:
            row = evaluate_point(spec.scheme, point, spec.mode)
        except ForkRateError as exc:
            skipped.append((coords, f"{exc.code}: {exc}"))
            continue
        rows.append(SweepRow(coords, row.value, row.t_star, row.y_star))
    return rows, skipped


def _product(grids):
    if len(grids) == 1:
        return [(v,) for v in grids[0]]
    return [(a, b) for a in grids[0] for b in grids[1]]


def _ax(name, lo, hi, steps):
    return Axis(name, float(lo), float(hi), steps)


def _presets() -> Dict[str, List[SweepSpec]]:
    t_ax = _ax("t", 0.5, 20, 40)
    xi_ax = _ax("xi", -0.8, 0.8, 17)
    b_ax = _ax("b", 1, 20, 20)
    k_ax = _ax("k", 0.5, 5, 10)
    lam = {"lambda": 30.0}
    return {
        # I(q) over q and mu - lambda
        "fig1": [SweepSpec("iid", (_ax("q", 1, 20, 20), _ax("k", 0.5, 10, 20)), {"lambda": 1.0}, label="lambda=1")],
        # t-objective for b in {5, 10} (over xi) and xi in {-0.2, 0.8} (over b), k = 2
        "fig2": [
            SweepSpec("ar", (t_ax, xi_ax), {**lam, "k": 2.0, "b": 5.0}, label="b=5,k=2"),
            SweepSpec("ar", (t_ax, xi_ax), {**lam, "k": 2.0, "b": 10.0}, label="b=10,k=2"),
            SweepSpec("ar", (t_ax, b_ax), {**lam, "k": 2.0, "xi": -0.2}, label="xi=-0.2,k=2"),
            SweepSpec("ar", (t_ax, b_ax), {**lam, "k": 2.0, "xi": 0.8}, label="xi=0.8,k=2"),
        ],
        # I(b) over xi and b, k in {0.5, 2}
        "fig3": [
            SweepSpec("ar", (xi_ax, b_ax), {**lam, "k": k}, label=f"k={k:g}") for k in (0.5, 2.0)
        ],
        # I(b) over k and b, xi in {-0.2, 0.8}
        "fig4": [
            SweepSpec("ar", (k_ax, b_ax), {**lam, "xi": xi}, label=f"xi={xi:g}") for xi in (-0.2, 0.8)
        ],
        # I(b) over k and xi, b in {5, 10}
        "fig5": [
            SweepSpec("ar", (k_ax, xi_ax), {**lam, "b": b}, label=f"b={b:g}") for b in (5.0, 10.0)
        ],
        # t-objective over u, h in {2, 5}
        "fig6": [
            SweepSpec("many", (t_ax, _ax("u", 2, 18, 9)), {**lam, "h": h}, label=f"h={h:g}") for h in (2.0, 5.0)
        ],
        # t-objective over h, u in {5, 8}
        "fig7": [
            SweepSpec("many", (t_ax, _ax("h", 0.5, 20, 40)), {**lam, "u": u}, label=f"u={u:g}") for u in (5.0, 8.0)
        ],
        # I(u) over u and h
        "fig8": [SweepSpec("many", (_ax("u", 1, 20, 20), _ax("h", 0.5, 20, 40)), lam, label="lambda=30")],
    }


PRESETS = _presets()
